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

#include "chanrace/transform.hh"
#include "support/gen.hh"

using namespace chanrace;

TEST_CASE("simple protocol gets two guards before the second transmission") {
  TransformReport r = make_race_free(load_protocol("A -c-> B ; B -c-> C"));
  CHECK(render_expr(r.output) == "A -c-> B ; [A.1 < B.2] ; [B.1 < C.2] ; B -c-> C");
  REQUIRE(r.inserted_guards.size() == 2);
  CHECK(r.inserted_guards[0].channel == "c");
  CHECK(r.inserted_guards[0].after == TransIndex::of(1));
  CHECK(r.inserted_guards[0].before == TransIndex::of(2));
  CHECK(r.warnings.empty());
  CHECK(r.to_text() ==
        "# guard [A.1 < B.2] on c between transmissions 1 and 2\n"
        "# guard [B.1 < C.2] on c between transmissions 1 and 2\n"
        "A -c-> B ; [A.1 < B.2] ; [B.1 < C.2] ; B -c-> C\n");
}

TEST_CASE("different channels need no guards") {
  TransformReport r = make_race_free(load_protocol("A -c-> B ; B -d-> C"));
  CHECK(r.inserted_guards.empty());
  CHECK(render_expr(r.output) == "A -c-> B ; B -d-> C");
}

TEST_CASE("only immediate predecessors are guarded") {
  TransformReport r = make_race_free(load_protocol("A -c-> B ; B -c-> C ; C -c-> D"));
  CHECK(r.inserted_guards.size() == 4);
  CHECK(render_expr(r.output) ==
        "A -c-> B ; [A.1 < B.2] ; [B.1 < C.2] ; B -c-> C ; [B.2 < C.3] ; [C.2 < D.3] ; "
        "C -c-> D");
}

TEST_CASE("concurrent same-channel pairs produce a warning") {
  TransformReport r = make_race_free(load_protocol("A -c-> B || C -c-> D"));
  CHECK(r.inserted_guards.empty());
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("cyclic input is rejected") {
  GlobalProtocol g = load_protocol("A -c-> B ; [B.2 < B.1] ; B -c-> C");
  CHECK(screen_deadlock(g).has_value());
  CHECK_THROWS_AS(make_race_free(g), InputError);
}

TEST_CASE("transform is idempotent and keeps the HB order acyclic") {
  chanrace::testing::ProtocolGenerator gen(21, {});
  for (int i = 0; i < 300; ++i) {
    auto p = gen.next();
    INFO(p.text);
    TransformReport once = make_race_free(p.protocol);
    TransformReport twice = make_race_free(once.output);
    CHECK(twice.output == once.output);
    CHECK(twice.inserted_guards.empty());
    CHECK_FALSE(screen_deadlock(once.output).has_value());
    CHECK(transmissions_of(once.output).size() == transmissions_of(p.protocol).size());
  }
}
