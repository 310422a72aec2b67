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

#include <set>

#include "chanrace/event_order.hh"
#include "support/gen.hh"

using namespace chanrace;

namespace {

using Pairs = std::set<std::pair<TransIndex, TransIndex>>;

// ord(G1 ; G2) = ord(G1) + ord(G2) + T(G1) x T(G2); ord(G1 || G2) drops the
// cross product.
Pairs ordered(const GlobalProtocol& g, std::vector<TransIndex>& ts) {
  if (g.is_emp()) return {};
  if (g.is_leaf()) {
    if (auto* t = std::get_if<Transmission>(&g.value())) ts.push_back(*t->index);
    return {};
  }
  std::vector<TransIndex> l, r;
  Pairs out = ordered(g.left(), l);
  Pairs right = ordered(g.right(), r);
  out.insert(right.begin(), right.end());
  if (g.is_seq()) {
    for (const auto& a : l) {
      for (const auto& b : r) out.insert({a, b});
    }
  }
  ts.insert(ts.end(), l.begin(), l.end());
  ts.insert(ts.end(), r.begin(), r.end());
  return out;
}

}  // namespace

TEST_CASE("simple protocol orders") {
  GlobalProtocol g = load_protocol("A -c-> B ; B -c-> C");
  Orders o = derive_orders(g);
  auto ev = [](const char* s) { return EventRef::parse(s); };
  CHECK(event_happens_before(o.hb, ev("B.1"), ev("B.2")));
  CHECK_FALSE(event_happens_before(o.hb, ev("A.1"), ev("B.1")));
  CHECK_FALSE(event_happens_before(o.hb, ev("A.1"), ev("C.2")));
  CHECK(o.cb.triples().size() == 2);
  CHECK(*o.cb.send_of_receive(ev("C.2")) == ev("B.2"));
  CHECK_FALSE(detect_cycle(o.hb).has_value());
}

TEST_CASE("seq_ordered matches the recursive union formula") {
  chanrace::testing::ProtocolGenerator gen(11, {});
  for (int i = 0; i < 300; ++i) {
    auto p = gen.next();
    std::vector<TransIndex> ts;
    Pairs want = ordered(p.protocol, ts);
    INFO(p.text);
    for (const auto& a : ts) {
      for (const auto& b : ts) {
        CHECK(seq_ordered(p.protocol, a, b) == (want.count({a, b}) > 0));
      }
    }
  }
}

TEST_CASE("program order only between events of one party") {
  GlobalProtocol g = load_protocol("A -c-> B ; C -d-> D ; A -e-> C");
  Orders o = derive_orders(g);
  auto ev = [](const char* s) { return EventRef::parse(s); };
  CHECK(event_happens_before(o.hb, ev("A.1"), ev("A.3")));
  CHECK(event_happens_before(o.hb, ev("C.2"), ev("C.3")));
  CHECK_FALSE(event_happens_before(o.hb, ev("B.1"), ev("D.2")));
}

TEST_CASE("channel rules with capacity") {
  // Three sends then three receives on c with k = 1.
  HbOrder hb;
  auto ev = [](const char* s) { return EventRef::parse(s); };
  ChannelQueue q;
  q.sends = {ev("A.1"), ev("A.2"), ev("A.3")};
  q.receives = {ev("B.1"), ev("B.2"), ev("B.3")};
  Matching m;
  m.per_channel["c"] = q;
  HbOrder out = apply_channel_rules(hb, m, {{"c", Capacity::exact(1)}});
  auto S = [&](const char* s) { return EventPoint::start(ev(s), EventKind::kSend); };
  auto Sc = [&](const char* s) { return EventPoint::completion(ev(s), EventKind::kSend); };
  auto R = [&](const char* s) { return EventPoint::start(ev(s), EventKind::kReceive); };
  auto Rc = [&](const char* s) { return EventPoint::completion(ev(s), EventKind::kReceive); };
  CHECK(happens_before(out, S("A.1"), Rc("B.1")));
  CHECK(happens_before(out, R("B.1"), Sc("A.2")));
  CHECK(happens_before(out, R("B.2"), Sc("A.3")));
  CHECK_FALSE(happens_before(out, R("B.1"), Sc("A.1")));
  CHECK_THROWS_AS(apply_channel_rules(hb, m, {{"c", Capacity::any()}}), std::invalid_argument);
}

TEST_CASE("guards add edges and can close cycles") {
  GlobalProtocol g = load_protocol("A -c-> B ; [A.1 < B.2] ; [B.1 < C.2] ; B -c-> C ; [C.2 < B.1]");
  Orders o = derive_orders(g);
  auto cyc = detect_cycle(o.hb);
  REQUIRE(cyc.has_value());
  std::set<std::string> events;
  for (const auto& p : *cyc) events.insert(p.event.to_string());
  CHECK(events.count("B.1"));
  CHECK(events.count("C.2"));
}

TEST_CASE("HB-CB propagation flags unsoundness, CB-HB does not") {
  GlobalProtocol g = load_protocol("A -c-> B ; B -c-> C");
  Orders o = derive_orders(g);
  HbOrder hbcb = apply_propagation(o.hb, o.cb, PropagationRule::kHbCb);
  CHECK(hbcb.unsound_derivation());
  HbOrder cbhb = apply_propagation(o.hb, o.cb, PropagationRule::kCbHb);
  CHECK_FALSE(cbhb.unsound_derivation());
  auto ev = [](const char* s) { return EventRef::parse(s); };
  // B.1 before B.2, so the send A.1 feeding B.1 is placed before B.2.
  CHECK(check_isotone(o.cb, {ev("A.1"), ev("B.2")}, {ev("B.1"), ev("C.2")}));
  CHECK_FALSE(check_isotone(o.cb, {ev("A.1"), ev("B.2")}, {ev("C.2"), ev("B.1")}));
}
