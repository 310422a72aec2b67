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

#include "chanrace/event_order.hh"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>

namespace chanrace {

std::string EventPoint::to_string() const {
  return event.to_string() + (kind == EventKind::kSend ? ".S" : ".R") +
         (phase == Phase::kStart ? ".s" : ".c");
}

std::string HbEdge::label_text() const {
  switch (label) {
    case EdgeLabel::kInternal: return "internal";
    case EdgeLabel::kProgramOrder: return "program-order";
    case EdgeLabel::kChannel: return "channel(" + channel + ")";
    case EdgeLabel::kCapacityRule: return "capacity-rule(" + channel + ")";
    case EdgeLabel::kGuardAsserted: return "guard-asserted";
    case EdgeLabel::kDerived: return "derived";
    case EdgeLabel::kExecutionOrder: return "execution-order";
  }
  return "?";
}

// ------------------------------------------------------------------ HbOrder

int HbOrder::intern(const EventPoint& p) {
  auto [it, fresh] = index_.emplace(p, static_cast<int>(nodes_.size()));
  if (fresh) {
    nodes_.push_back(p);
    adj_.emplace_back();
  }
  return it->second;
}

void HbOrder::add_event(const EventRef& e, EventKind kind) {
  auto it = kinds_.find(e);
  if (it != kinds_.end()) {
    if (it->second != kind) {
      throw std::invalid_argument("event " + e.to_string() +
                                  " added as both send and receive");
    }
  }
  kinds_.emplace(e, kind);
  add_edge({EventPoint::start(e, kind), EventPoint::completion(e, kind),
            EdgeLabel::kInternal, ""});
}

bool HbOrder::add_edge(const HbEdge& edge) {
  if (!edge_set_.insert(edge).second) return false;
  int a = intern(edge.from);
  int b = intern(edge.to);
  kinds_.emplace(edge.from.event, edge.from.kind);
  kinds_.emplace(edge.to.event, edge.to.kind);
  edges_.push_back(edge);
  adj_[a].push_back(b);
  return true;
}

EventKind HbOrder::kind_of(const EventRef& e) const {
  auto it = kinds_.find(e);
  if (it == kinds_.end()) {
    throw std::out_of_range("unknown event " + e.to_string());
  }
  return it->second;
}

std::vector<EventRef> HbOrder::events() const {
  std::vector<EventRef> out;
  for (const auto& [e, k] : kinds_) out.push_back(e);
  return out;
}

int HbOrder::id_of(const EventPoint& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) {
    throw std::out_of_range("unknown event point " + p.to_string());
  }
  return it->second;
}

// ------------------------------------------------------------------ CbOrder

void CbOrder::add(const CbTriple& t) {
  for (const auto& x : triples_) {
    if (x.send == t.send || x.receive == t.receive) {
      throw std::invalid_argument("event already paired in CB order: " +
                                  t.send.to_string() + " -> " +
                                  t.receive.to_string());
    }
  }
  triples_.push_back(t);
}

std::optional<EventRef> CbOrder::send_of_receive(const EventRef& r) const {
  for (const auto& t : triples_) {
    if (t.receive == r) return t.send;
  }
  return std::nullopt;
}

std::optional<EventRef> CbOrder::partner_of_send(const EventRef& s) const {
  for (const auto& t : triples_) {
    if (t.send == s) return t.receive;
  }
  return std::nullopt;
}

bool CbOrder::operator==(const CbOrder& o) const {
  auto a = triples_, b = o.triples_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::vector<MatchedPair> ChannelQueue::pairs() const {
  std::vector<MatchedPair> out;
  for (std::size_t i = 0; i < sends.size() && i < receives.size(); ++i) {
    out.push_back({sends[i], receives[i]});
  }
  return out;
}

std::optional<EventRef> Matching::send_of(const EventRef& receive) const {
  for (const auto& [c, q] : per_channel) {
    for (const auto& p : q.pairs()) {
      if (p.receive == receive) return p.send;
    }
  }
  return std::nullopt;
}

// -------------------------------------------------------- sequential order

namespace {

// Root-to-leaf path of each transmission: (node, went right) per step.
using Step = std::pair<const void*, bool>;

void collect_paths(const GlobalProtocol& g, std::vector<Step>& cur,
                   std::map<TransIndex, std::vector<Step>>& paths,
                   std::map<const void*, bool>& is_seq) {
  if (g.is_emp()) return;
  if (g.is_leaf()) {
    if (auto* t = std::get_if<Transmission>(&g.value()); t && t->index) {
      paths[*t->index] = cur;
    }
    return;
  }
  const void* id = &g.left();
  is_seq[id] = g.is_seq();
  cur.emplace_back(id, false);
  collect_paths(g.left(), cur, paths, is_seq);
  cur.back().second = true;
  collect_paths(g.right(), cur, paths, is_seq);
  cur.pop_back();
}

struct PathTable {
  std::map<TransIndex, std::vector<Step>> paths;
  std::map<const void*, bool> is_seq;

  explicit PathTable(const GlobalProtocol& g) {
    std::vector<Step> cur;
    collect_paths(g, cur, paths, is_seq);
  }

  bool ordered(const TransIndex& a, const TransIndex& b) const {
    auto ia = paths.find(a), ib = paths.find(b);
    if (ia == paths.end() || ib == paths.end()) {
      throw std::out_of_range("unknown transmission index");
    }
    const auto& pa = ia->second;
    const auto& pb = ib->second;
    std::size_t i = 0;
    while (i < pa.size() && i < pb.size() && pa[i] == pb[i]) ++i;
    if (i >= pa.size() || i >= pb.size()) return false;
    // Both paths pass through the same node at depth i but diverge there.
    return is_seq.at(pa[i].first) && !pa[i].second && pb[i].second;
  }
};

}  // namespace

bool seq_ordered(const GlobalProtocol& g, const TransIndex& a,
                 const TransIndex& b) {
  return PathTable(g).ordered(a, b);
}

std::vector<std::pair<Transmission, Transmission>> seq_ordered_pairs(
    const GlobalProtocol& g) {
  PathTable table(g);
  auto ts = transmissions_of(g);
  std::vector<std::pair<Transmission, Transmission>> out;
  for (const auto& a : ts) {
    for (const auto& b : ts) {
      if (a.index && b.index && table.ordered(*a.index, *b.index)) {
        out.emplace_back(a, b);
      }
    }
  }
  return out;
}

// ------------------------------------------------------------ derivation

Orders derive_orders(const GlobalProtocol& g) {
  Orders o;
  auto ts = transmissions_of(g);
  for (const auto& t : ts) {
    if (!t.index) throw std::invalid_argument("protocol is not indexed");
    o.hb.add_event(t.send_event(), EventKind::kSend);
    o.hb.add_event(t.receive_event(), EventKind::kReceive);
    o.cb.add({t.send_event(), t.channel, t.receive_event()});
  }
  for (const auto& [t1, t2] : seq_ordered_pairs(g)) {
    for (const auto& e1 : {t1.send_event(), t1.receive_event()}) {
      for (const auto& e2 : {t2.send_event(), t2.receive_event()}) {
        if (e1.party != e2.party) continue;
        o.hb.add_edge({o.hb.completion_of(e1), o.hb.start_of(e2),
                       EdgeLabel::kProgramOrder, ""});
      }
    }
  }
  for (const auto& gd : guards_of(g)) {
    o.hb.add_edge({o.hb.completion_of(gd.lhs), o.hb.start_of(gd.rhs),
                   EdgeLabel::kGuardAsserted, ""});
  }
  return o;
}

HbOrder apply_channel_rules(const HbOrder& hb, const Matching& m,
                            const CapacityMap& capacities) {
  HbOrder out = hb;
  for (const auto& [name, q] : m.per_channel) {
    auto cap = capacities.find(name);
    if (cap == capacities.end()) {
      throw std::invalid_argument("no capacity for channel " + name);
    }
    if (cap->second.is_any()) {
      throw std::invalid_argument("channel " + name +
                                  " has unresolved capacity 'any'");
    }
    std::size_t k = cap->second.value();
    for (const auto& s : q.sends) out.add_event(s, EventKind::kSend);
    for (const auto& r : q.receives) out.add_event(r, EventKind::kReceive);
    for (std::size_t i = 0; i < q.sends.size() && i < q.receives.size(); ++i) {
      out.add_edge({EventPoint::start(q.sends[i], EventKind::kSend),
                    EventPoint::completion(q.receives[i], EventKind::kReceive),
                    EdgeLabel::kChannel, name});
    }
    for (std::size_t i = 0; i < q.receives.size() && i + k < q.sends.size();
         ++i) {
      out.add_edge({EventPoint::start(q.receives[i], EventKind::kReceive),
                    EventPoint::completion(q.sends[i + k], EventKind::kSend),
                    EdgeLabel::kCapacityRule, name});
    }
  }
  return out;
}

// ----------------------------------------------------------- reachability

namespace {

bool reaches(const HbOrder& hb, int from, int to) {
  std::vector<char> seen(hb.nodes().size(), 0);
  std::vector<int> stack;
  for (int n : hb.successors(from)) stack.push_back(n);
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (n == to) return true;
    if (seen[n]) continue;
    seen[n] = 1;
    for (int s : hb.successors(n)) stack.push_back(s);
  }
  return false;
}

}  // namespace

bool happens_before(const HbOrder& hb, const EventPoint& a,
                    const EventPoint& b) {
  return reaches(hb, hb.id_of(a), hb.id_of(b));
}

bool event_happens_before(const HbOrder& hb, const EventRef& a,
                          const EventRef& b) {
  return happens_before(hb, hb.completion_of(a), hb.start_of(b));
}

std::optional<std::vector<EventPoint>> detect_cycle(const HbOrder& hb) {
  const auto& nodes = hb.nodes();
  std::vector<int> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return nodes[a] < nodes[b]; });
  auto sorted_succ = [&](int n) {
    std::vector<int> s = hb.successors(n);
    std::sort(s.begin(), s.end(),
              [&](int a, int b) { return nodes[a] < nodes[b]; });
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };

  std::optional<std::vector<int>> best;
  for (int root : order) {
    // BFS for the shortest path root -> ... -> root.
    std::vector<int> parent(nodes.size(), -1);
    std::vector<char> seen(nodes.size(), 0);
    std::deque<int> queue{root};
    seen[root] = 1;
    int closing = -1;
    while (!queue.empty() && closing < 0) {
      int n = queue.front();
      queue.pop_front();
      for (int s : sorted_succ(n)) {
        if (s == root) {
          closing = n;
          break;
        }
        if (!seen[s]) {
          seen[s] = 1;
          parent[s] = n;
          queue.push_back(s);
        }
      }
    }
    if (closing < 0) continue;
    std::vector<int> cyc;
    for (int n = closing; n != -1; n = parent[n]) cyc.push_back(n);
    std::reverse(cyc.begin(), cyc.end());
    if (!best || cyc.size() < best->size()) best = cyc;
  }
  if (!best) return std::nullopt;
  std::vector<EventPoint> out;
  for (int n : *best) out.push_back(nodes[n]);
  return out;
}

// ------------------------------------------------------------ propagation

HbOrder apply_propagation(const HbOrder& hb, const CbOrder& cb,
                          PropagationRule rule) {
  HbOrder out = hb;
  for (const auto& t : cb.triples()) {
    out.add_event(t.send, EventKind::kSend);
    out.add_event(t.receive, EventKind::kReceive);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    auto events = out.events();
    for (const auto& t : cb.triples()) {
      for (const auto& e : events) {
        if (rule == PropagationRule::kCbHb) {
          // S CB R and R HB E  =>  S HB E
          if (e == t.send || !event_happens_before(out, t.receive, e)) continue;
          if (event_happens_before(out, t.send, e)) continue;
          changed |= out.add_edge({out.completion_of(t.send), out.start_of(e),
                                   EdgeLabel::kDerived, ""});
        } else {
          // E HB S and S CB R  =>  E HB R
          if (e == t.receive || !event_happens_before(out, e, t.send)) continue;
          if (event_happens_before(out, e, t.receive)) continue;
          changed |= out.add_edge({out.completion_of(e),
                                   out.start_of(t.receive),
                                   EdgeLabel::kDerived, ""});
        }
      }
    }
  }
  if (rule == PropagationRule::kHbCb) out.mark_unsound();
  return out;
}

EventRef receive_of_send(const CbOrder& cb, const EventRef& s) {
  auto r = cb.partner_of_send(s);
  if (!r) throw std::out_of_range("send " + s.to_string() + " has no CB partner");
  return *r;
}

bool check_isotone(const CbOrder& cb, const std::vector<EventRef>& send_order,
                   const std::vector<EventRef>& recv_order) {
  auto pos = [&](const EventRef& r) {
    auto it = std::find(recv_order.begin(), recv_order.end(), r);
    if (it == recv_order.end()) {
      throw std::out_of_range("receive " + r.to_string() +
                              " missing from the receive order");
    }
    return it - recv_order.begin();
  };
  for (std::size_t i = 0; i < send_order.size(); ++i) {
    for (std::size_t j = i + 1; j < send_order.size(); ++j) {
      if (pos(receive_of_send(cb, send_order[i])) >=
          pos(receive_of_send(cb, send_order[j]))) {
        return false;
      }
    }
  }
  return true;
}

std::string dump_order(const HbOrder& hb) {
  std::string out;
  for (const auto& e : hb.edges()) {
    out += e.from.to_string() + " -> " + e.to.to_string() + " [" +
           e.label_text() + "]\n";
  }
  return out;
}

}  // namespace chanrace
