/*
 * Copyright (c) 2026, The chanrace Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include <doctest.h>

#include "chanrace/protocol.hh"
#include "support/gen.hh"

using namespace chanrace;

TEST_CASE("parse assigns indexes left to right") {
  GlobalProtocol g = load_protocol("A -c-> B ; B -c-> C");
  auto ts = transmissions_of(g);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].index == TransIndex::of(1));
  CHECK(ts[1].send_event().to_string() == "B.2");
  CHECK(ts[1].receive_event().to_string() == "C.2");
  CHECK(ts[0].channel.capacity.is_any());
}

TEST_CASE("seq binds tighter than par, both right associative") {
  GlobalProtocol g = load_protocol("A -c-> B ; B -d-> C || C -e-> D");
  REQUIRE(g.is_par());
  CHECK(g.left().is_seq());
  GlobalProtocol h = load_protocol("A -c-> B ; B -c-> C ; C -c-> A");
  REQUIRE(h.is_seq());
  CHECK(h.left().is_leaf());
  CHECK(h.right().is_seq());
}

TEST_CASE("capacity headers and inline capacities") {
  GlobalProtocol g = load_protocol("chan c cap 2\nA -c-> B ; B -d:0-> A");
  auto cs = channels_of(g);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].capacity == Capacity::exact(2));
  CHECK(cs[1].capacity == Capacity::exact(0));
  CHECK(render_protocol(g) == "chan c cap 2\nchan d cap 0\nA -c-> B ; B -d-> A");
}

TEST_CASE("input errors carry a location") {
  CHECK_THROWS_AS(load_protocol("A -c-> A"), InputError);
  CHECK_THROWS_AS(load_protocol("chan c cap 1\nA -c:2-> B"), InputError);
  CHECK_THROWS_AS(load_protocol("A -c-> B ;"), InputError);
  CHECK_THROWS_AS(load_protocol("A -c-> B ; [A.1 < B.7]"), InputError);
  try {
    load_protocol("A -c-> B ;\n  ; B -c-> C");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).rfind("2:", 0) == 0);
  }
}

TEST_CASE("ill-formed concurrent send and receive on one channel") {
  // A both receives and sends on c across the two branches.
  CHECK_THROWS_AS(load_protocol("A -c-> B || C -c-> A"), InputError);
  CHECK_NOTHROW(load_protocol("A -c-> B || C -d-> A"));
}

TEST_CASE("emp and comments") {
  GlobalProtocol g = load_protocol("# nothing here\nemp");
  CHECK(g.is_emp());
  CHECK(render_expr(g) == "emp");
  GlobalProtocol h = load_protocol("emp ; A -c-> B ; emp");
  CHECK(render_expr(normalize(h)) == "A -c-> B");
}

TEST_CASE("guards render and roundtrip") {
  const char* text = "A -c-> B ; [A.1 < B.2] ; [B.1 < C.2] ; B -c-> C";
  GlobalProtocol g = load_protocol(text);
  CHECK(render_expr(g) == text);
  CHECK(guards_of(g).size() == 2);
  CHECK(load_protocol(render_protocol(g)) == g);
}

TEST_CASE("normalize sorts concurrent operands and flattens") {
  GlobalProtocol a = load_protocol("(C -d-> D || A -c-> B) ; (B -e-> C ; D -e-> A)");
  GlobalProtocol n = normalize(a);
  CHECK(render_expr(n) == "(A -c-> B || C -d-> D) ; B -e-> C ; D -e-> A");
  CHECK(normalize(n) == n);
}

TEST_CASE("random protocols: roundtrip and idempotence") {
  chanrace::testing::GenOptions opts;
  opts.max_guards = 2;
  chanrace::testing::ProtocolGenerator gen(7, opts);
  for (int i = 0; i < 300; ++i) {
    auto p = gen.next();
    INFO(p.text);
    CHECK(load_protocol(render_protocol(p.protocol)) == p.protocol);
    CHECK(normalize(normalize(p.protocol)) == normalize(p.protocol));
    CHECK(index_transmissions(p.protocol) == p.protocol);
    CHECK(events_of(normalize(p.protocol)) == events_of(p.protocol));
  }
}
