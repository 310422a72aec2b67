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

#ifndef CHANRACE_EVENT_ORDER_HH_
#define CHANRACE_EVENT_ORDER_HH_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "chanrace/protocol.hh"

namespace chanrace {

enum class Phase { kStart, kCompletion };

struct EventPoint {
  EventRef event;
  EventKind kind;
  Phase phase;

  static EventPoint start(const EventRef& e, EventKind k) {
    return {e, k, Phase::kStart};
  }
  static EventPoint completion(const EventRef& e, EventKind k) {
    return {e, k, Phase::kCompletion};
  }

  // Party.index.{S|R}.{s|c}
  std::string to_string() const;

  auto operator<=>(const EventPoint&) const = default;
};

enum class EdgeLabel {
  kInternal,        // start -> completion of one event
  kProgramOrder,
  kChannel,         // send starts before its receive completes
  kCapacityRule,    // i-th receive starts before (i+k)-th send completes
  kGuardAsserted,
  kDerived,         // propagation lemmas
  kExecutionOrder,  // linear order of a sequential execution
};

struct HbEdge {
  EventPoint from;
  EventPoint to;
  EdgeLabel label;
  std::string channel;  // only for kChannel and kCapacityRule

  std::string label_text() const;

  auto operator<=>(const HbEdge&) const = default;
};

/**
 * Labeled edge set over event points. Reachability is answered on demand;
 * no transitive edge is ever stored.
 */
class HbOrder {
 public:
  // Adds both points of the event and the internal edge.
  void add_event(const EventRef& e, EventKind kind);
  // Returns false if an identical edge is already present.
  bool add_edge(const HbEdge& edge);

  bool contains(const EventPoint& p) const { return index_.count(p) > 0; }
  bool has_event(const EventRef& e) const { return kinds_.count(e) > 0; }
  EventKind kind_of(const EventRef& e) const;

  EventPoint start_of(const EventRef& e) const {
    return EventPoint::start(e, kind_of(e));
  }
  EventPoint completion_of(const EventRef& e) const {
    return EventPoint::completion(e, kind_of(e));
  }

  const std::vector<EventPoint>& nodes() const { return nodes_; }
  const std::vector<HbEdge>& edges() const { return edges_; }
  std::vector<EventRef> events() const;

  // Node ids of direct successors.
  const std::vector<int>& successors(int node) const { return adj_[node]; }
  int id_of(const EventPoint& p) const;

  bool unsound_derivation() const { return unsound_; }
  void mark_unsound() { unsound_ = true; }

 private:
  int intern(const EventPoint& p);

  std::vector<EventPoint> nodes_;
  std::map<EventPoint, int> index_;
  std::map<EventRef, EventKind> kinds_;
  std::vector<HbEdge> edges_;
  std::set<HbEdge> edge_set_;
  std::vector<std::vector<int>> adj_;
  bool unsound_ = false;
};

struct CbTriple {
  EventRef send;
  Channel channel;
  EventRef receive;

  auto operator<=>(const CbTriple& o) const {
    return std::tie(send, receive) <=> std::tie(o.send, o.receive);
  }
  bool operator==(const CbTriple& o) const {
    return send == o.send && receive == o.receive && channel == o.channel;
  }
};

class CbOrder {
 public:
  // Throws std::invalid_argument if the send or receive is already paired.
  void add(const CbTriple& t);
  const std::vector<CbTriple>& triples() const { return triples_; }
  std::optional<EventRef> send_of_receive(const EventRef& r) const;
  std::optional<EventRef> partner_of_send(const EventRef& s) const;

  bool operator==(const CbOrder& o) const;

 private:
  std::vector<CbTriple> triples_;
};

struct MatchedPair {
  EventRef send;
  EventRef receive;
  bool operator==(const MatchedPair&) const = default;
};

/**
 * FIFO communication per channel: the i-th receive takes the value of the
 * i-th send. Sends without a receive stay in the queue.
 */
struct ChannelQueue {
  std::vector<EventRef> sends;
  std::vector<EventRef> receives;

  std::vector<MatchedPair> pairs() const;
  bool operator==(const ChannelQueue&) const = default;
};

struct Matching {
  std::map<std::string, ChannelQueue> per_channel;

  std::optional<EventRef> send_of(const EventRef& receive) const;
  bool operator==(const Matching&) const = default;
};

using CapacityMap = std::map<std::string, Capacity>;

struct Orders {
  HbOrder hb;
  CbOrder cb;
};

// True iff the lowest common ancestor of a and b is a Seq with a on the left.
bool seq_ordered(const GlobalProtocol& g, const TransIndex& a,
                 const TransIndex& b);
std::vector<std::pair<Transmission, Transmission>> seq_ordered_pairs(
    const GlobalProtocol& g);

Orders derive_orders(const GlobalProtocol& g);

HbOrder apply_channel_rules(const HbOrder& hb, const Matching& m,
                            const CapacityMap& capacities);

bool happens_before(const HbOrder& hb, const EventPoint& a,
                    const EventPoint& b);
// completion(a) reaches start(b).
bool event_happens_before(const HbOrder& hb, const EventRef& a,
                          const EventRef& b);

std::optional<std::vector<EventPoint>> detect_cycle(const HbOrder& hb);

enum class PropagationRule { kCbHb, kHbCb };

HbOrder apply_propagation(const HbOrder& hb, const CbOrder& cb,
                          PropagationRule rule);

EventRef receive_of_send(const CbOrder& cb, const EventRef& s);

bool check_isotone(const CbOrder& cb, const std::vector<EventRef>& send_order,
                   const std::vector<EventRef>& recv_order);

// `<point> -> <point> [label]`, one edge per line.
std::string dump_order(const HbOrder& hb);

}  // namespace chanrace

#endif  // CHANRACE_EVENT_ORDER_HH_
