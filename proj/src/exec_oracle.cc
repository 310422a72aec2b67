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

#include "chanrace/exec_oracle.hh"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "chanrace/projection.hh"

namespace chanrace {

std::string ExecEvent::to_string() const {
  return event.to_string() + (kind == EventKind::kSend ? ".S@" : ".R@") + channel;
}

std::string SequentialExecution::dump() const {
  std::string out;
  for (const auto& e : order) out += e.to_string() + "\n";
  for (const auto& [c, q] : matching.per_channel) {
    for (const auto& p : q.pairs()) {
      out += p.receive.to_string() + " <- " + p.send.to_string() + "\n";
    }
  }
  for (const auto& e : blocked) out += e.to_string() + " blocked\n";
  return out;
}

Matching fifo_matching(const std::vector<ExecEvent>& order) {
  Matching m;
  for (const auto& e : order) {
    auto& q = m.per_channel[e.channel];
    (e.kind == EventKind::kSend ? q.sends : q.receives).push_back(e.event);
  }
  return m;
}

namespace {

ExecEvent parse_exec_event(const std::string& tok, int line) {
  auto at = tok.find('@');
  if (at == std::string::npos || at < 3 || tok[at - 2] != '.' ||
      (tok[at - 1] != 'S' && tok[at - 1] != 'R')) {
    throw InputError("malformed trace event '" + tok + "'", line, 1);
  }
  ExecEvent e;
  e.event = EventRef::parse(tok.substr(0, at - 2));
  e.kind = tok[at - 1] == 'S' ? EventKind::kSend : EventKind::kReceive;
  e.channel = tok.substr(at + 1);
  return e;
}

}  // namespace

SequentialExecution parse_trace(std::string_view text) {
  SequentialExecution ex;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  std::vector<std::pair<EventRef, EventRef>> pairs;  // recv, send
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::istringstream ws(raw);
    std::vector<std::string> toks;
    for (std::string t; ws >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks.size() == 3 && toks[1] == "<-") {
      pairs.emplace_back(EventRef::parse(toks[0]), EventRef::parse(toks[2]));
    } else if (toks.size() == 2 && toks[1] == "blocked") {
      ex.blocked.push_back(parse_exec_event(toks[0], line));
    } else if (toks.size() == 1) {
      ex.order.push_back(parse_exec_event(toks[0], line));
    } else {
      throw InputError("malformed trace line '" + raw + "'", line, 1);
    }
  }
  ex.matching = fifo_matching(ex.order);
  // Explicit matching lines must agree with FIFO order.
  for (const auto& [r, s] : pairs) {
    auto got = ex.matching.send_of(r);
    if (!got || !(*got == s)) {
      throw InputError("matching " + r.to_string() + " <- " + s.to_string() +
                       " contradicts FIFO order of the trace");
    }
  }
  return ex;
}

// ---------------------------------------------------------------- models

ExecModel model_of(const GlobalProtocol& g, unsigned any_capacity) {
  ExecModel m;
  for (const auto& c : channels_of(g)) {
    m.capacities.insert_or_assign(c.name,
        c.capacity.is_any() ? Capacity::exact(any_capacity) : c.capacity);
  }
  Orders o = derive_orders(g);
  for (const auto& e : events_of(g)) {
    m.events.push_back({e.event, e.kind, e.channel.name});
  }
  m.preds.resize(m.events.size());
  for (std::size_t i = 0; i < m.events.size(); ++i) {
    for (std::size_t j = 0; j < m.events.size(); ++j) {
      if (i != j && event_happens_before(o.hb, m.events[j].event, m.events[i].event)) {
        m.preds[i].push_back(static_cast<int>(j));
      }
    }
  }
  m.cb = o.cb;
  return m;
}

ExecModel model_of(const Program& prog, const GlobalProtocol* bound,
                   const Bindings& bindings) {
  ExecModel m;
  for (const auto& d : prog.channels) m.capacities.insert_or_assign(d.name, Capacity::exact(d.capacity));
  auto traces = extract_parties(prog);

  // function -> (protocol party, program channel -> endpoint events in order)
  struct Align {
    PartyId party;
    std::map<std::string, std::vector<std::pair<EventRef, EventKind>>> per_channel;
  };
  std::map<std::string, Align> align;
  if (bound) {
    ProjectionContext ctx(*bound);
    auto rename = bind_fresh_channels(prog, *bound, ctx, bindings);
    auto chan = [&rename](const std::string& c) {
      auto it = rename.find(c);
      return it == rename.end() ? c : it->second;
    };
    for (const auto& p : parties_of(*bound)) {
      auto it = bindings.party_to_function.find(p.name);
      std::string fn = it == bindings.party_to_function.end() ? p.name : it->second;
      Align a{p, {}};
      project_party(*bound, p, ctx).for_each_leaf([&](const PartyLeaf& l) {
        if (auto* s = std::get_if<PartySend>(&l)) {
          a.per_channel[chan(s->channel.name)].emplace_back(s->event, EventKind::kSend);
        } else if (auto* r = std::get_if<PartyRecv>(&l)) {
          a.per_channel[chan(r->channel.name)].emplace_back(r->event, EventKind::kReceive);
        }
      });
      align[fn] = a;
    }
    Orders o = derive_orders(*bound);
    for (const auto& t : o.cb.triples()) {
      m.cb.add({t.send, Channel{t.channel.name, t.channel.capacity}, t.receive});
    }
    for (const auto& r : ctx.guards()) {
      if (!r.rendezvous) continue;
      m.cb.add({r.send_event(), Channel{chan(r.channel.name), Capacity::exact(0)},
                r.receive_event()});
    }
  }

  for (const auto& t : traces) {
    auto it = align.find(t.party.name);
    PartyId who = it == align.end() ? t.party : it->second.party;
    std::map<std::string, std::size_t> seen;
    int prev = -1;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const Stmt& s = t.steps[i];
      EventKind kind = s.is_send() ? EventKind::kSend : EventKind::kReceive;
      EventRef ev{who, TransIndex{{0, static_cast<int>(i + 1)}}};
      if (it != align.end()) {
        auto pc = it->second.per_channel.find(s.channel());
        std::size_t k = seen[s.channel()]++;
        if (pc != it->second.per_channel.end() && k < pc->second.size() &&
            pc->second[k].second == kind) {
          ev = pc->second[k].first;
        }
      } else if (!bound) {
        ev = EventRef{who, TransIndex::of(static_cast<int>(i + 1))};
      }
      m.events.push_back({ev, kind, s.channel()});
      m.preds.emplace_back();
      if (prev >= 0) m.preds.back().push_back(prev);
      prev = static_cast<int>(m.events.size() - 1);
    }
  }
  return m;
}

// ------------------------------------------------------------ exploration

namespace {

struct Move {
  int a;
  int b = -1;  // receive of a rendezvous pair
};

class Explorer {
 public:
  explicit Explorer(const ExecModel& m) : m_(m) {
    for (const auto& e : m.events) {
      if (!chan_id_.count(e.channel)) {
        int id = static_cast<int>(chan_id_.size());
        chan_id_[e.channel] = id;
        auto cap = m.capacities.find(e.channel);
        if (cap == m.capacities.end() || cap->second.is_any()) {
          throw std::invalid_argument("no concrete capacity for channel " + e.channel);
        }
        caps_.push_back(cap->second.value());
      }
    }
  }

  struct State {
    std::vector<char> done;
    std::vector<std::deque<int>> buffers;

    std::string key() const {
      std::string k(done.begin(), done.end());
      for (const auto& b : buffers) {
        k += '|';
        for (int x : b) k += std::to_string(x) + ",";
      }
      return k;
    }
  };

  State initial() const {
    return State{std::vector<char>(m_.events.size(), 0),
                 std::vector<std::deque<int>>(caps_.size())};
  }

  bool enabled(const State& s, int e) const {
    if (s.done[e]) return false;
    for (int p : m_.preds[e]) {
      if (!s.done[p]) return false;
    }
    return true;
  }

  int chan(int e) const { return chan_id_.at(m_.events[e].channel); }
  bool is_send(int e) const { return m_.events[e].kind == EventKind::kSend; }

  std::vector<Move> moves(const State& s) const {
    std::vector<Move> out;
    const int n = static_cast<int>(m_.events.size());
    for (int e = 0; e < n; ++e) {
      if (!enabled(s, e)) continue;
      int c = chan(e);
      unsigned k = caps_[c];
      if (k == 0) {
        if (!is_send(e)) continue;
        for (int r = 0; r < n; ++r) {
          if (r != e && !is_send(r) && chan(r) == c && enabled(s, r) &&
              m_.events[r].event.party != m_.events[e].event.party) {
            out.push_back({e, r});
          }
        }
      } else if (is_send(e)) {
        if (s.buffers[c].size() < k) out.push_back({e});
      } else if (!s.buffers[c].empty()) {
        out.push_back({e});
      }
    }
    return out;
  }

  // Applies the move; returns (receive, matched send) if it delivers a value.
  std::optional<std::pair<int, int>> apply(State& s, const Move& mv,
                                           SequentialExecution* ex) const {
    auto record = [&](int e) {
      if (!ex) return;
      ex->order.push_back(m_.events[e]);
      auto& q = ex->matching.per_channel[m_.events[e].channel];
      (is_send(e) ? q.sends : q.receives).push_back(m_.events[e].event);
    };
    s.done[mv.a] = 1;
    record(mv.a);
    if (mv.b >= 0) {
      s.done[mv.b] = 1;
      record(mv.b);
      return std::make_pair(mv.b, mv.a);
    }
    int c = chan(mv.a);
    if (is_send(mv.a)) {
      s.buffers[c].push_back(mv.a);
      return std::nullopt;
    }
    int from = s.buffers[c].front();
    s.buffers[c].pop_front();
    return std::make_pair(mv.a, from);
  }

  bool violates(const std::pair<int, int>& delivery) const {
    auto expected = m_.cb.send_of_receive(m_.events[delivery.first].event);
    return expected && !(*expected == m_.events[delivery.second].event);
  }

  // Stuck state: some receive expecting data never got any.
  bool starved(const State& s) const {
    for (std::size_t e = 0; e < m_.events.size(); ++e) {
      if (!s.done[e] && !is_send(static_cast<int>(e)) &&
          m_.cb.send_of_receive(m_.events[e].event)) {
        return true;
      }
    }
    return false;
  }

  void finish(const State& s, SequentialExecution& ex) const {
    for (std::size_t e = 0; e < m_.events.size(); ++e) {
      if (!s.done[e]) ex.blocked.push_back(m_.events[e]);
    }
  }

  void enumerate(const State& s, SequentialExecution& cur,
                 std::vector<SequentialExecution>& out) const {
    auto ms = moves(s);
    if (ms.empty()) {
      SequentialExecution done = cur;
      finish(s, done);
      out.push_back(std::move(done));
      return;
    }
    for (const auto& mv : ms) {
      State next = s;
      SequentialExecution ex = cur;
      apply(next, mv, &ex);
      enumerate(next, ex, out);
    }
  }

  // (maximal executions, racy ones) reachable from s.
  std::pair<std::uint64_t, std::uint64_t> count(const State& s) {
    std::string k = s.key();
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    auto ms = moves(s);
    std::pair<std::uint64_t, std::uint64_t> r{0, 0};
    if (ms.empty()) {
      r = {1, starved(s) ? 1u : 0u};
    } else {
      for (const auto& mv : ms) {
        State next = s;
        auto d = apply(next, mv, nullptr);
        auto sub = count(next);
        r.first += sub.first;
        r.second += d && violates(*d) ? sub.first : sub.second;
      }
    }
    memo_.emplace(k, r);
    return r;
  }

  // Follows racy branches using the memo filled by count().
  SequentialExecution racy_path(State s) {
    SequentialExecution ex;
    bool tainted = false;
    for (;;) {
      auto ms = moves(s);
      if (ms.empty()) break;
      bool moved = false;
      for (const auto& mv : ms) {
        State next = s;
        SequentialExecution trial = ex;
        auto d = apply(next, mv, &trial);
        bool v = d && violates(*d);
        if (tainted || v || count(next).second > 0) {
          tainted = tainted || v;
          s = next;
          ex = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    finish(s, ex);
    return ex;
  }

 private:
  const ExecModel& m_;
  std::map<std::string, int> chan_id_;
  std::vector<unsigned> caps_;
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> memo_;
};

}  // namespace

std::vector<SequentialExecution> enumerate_executions(const ExecModel& m,
                                                      std::size_t bound) {
  if (m.events.size() > bound) {
    throw std::length_error("model has " + std::to_string(m.events.size()) +
                            " events, bound is " + std::to_string(bound));
  }
  Explorer x(m);
  std::vector<SequentialExecution> out;
  SequentialExecution cur;
  x.enumerate(x.initial(), cur, out);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.dump() < b.dump();
  });
  return out;
}

RaceSearch find_races(const ExecModel& m) {
  Explorer x(m);
  RaceSearch r;
  auto [total, racy] = x.count(x.initial());
  r.executions = total;
  r.racy = racy;
  if (racy > 0) r.witness = x.racy_path(x.initial());
  return r;
}

// ---------------------------------------------------------------- legality

LegalityVerdict check_legal(const SequentialExecution& e,
                            const CapacityMap& capacities) {
  LegalityVerdict v;
  std::set<EventRef> seen;
  for (const auto& x : e.order) {
    if (!seen.insert(x.event).second) {
      return {false, std::nullopt, "event " + x.event.to_string() + " occurs twice"};
    }
  }
  Matching induced = fifo_matching(e.order);
  for (const auto& [c, q] : e.matching.per_channel) {
    if (q.sends.empty() && q.receives.empty()) continue;
    auto it = induced.per_channel.find(c);
    if (it == induced.per_channel.end() || !(it->second == q)) {
      return {false, std::nullopt,
              "matching on channel " + c + " is not the FIFO order of the execution"};
    }
  }
  for (const auto& [c, q] : induced.per_channel) {
    auto it = e.matching.per_channel.find(c);
    if (it == e.matching.per_channel.end() || !(it->second == q)) {
      return {false, std::nullopt,
              "matching on channel " + c + " is not the FIFO order of the execution"};
    }
  }

  HbOrder hb;
  for (const auto& x : e.order) hb.add_event(x.event, x.kind);
  for (std::size_t i = 0; i + 1 < e.order.size(); ++i) {
    hb.add_edge({EventPoint::completion(e.order[i].event, e.order[i].kind),
                 EventPoint::start(e.order[i + 1].event, e.order[i + 1].kind),
                 EdgeLabel::kExecutionOrder, ""});
  }

  CapacityMap rules;
  for (const auto& [c, q] : induced.per_channel) {
    auto cap = capacities.find(c);
    if (cap == capacities.end() || cap->second.is_any()) {
      return {false, std::nullopt, "no concrete capacity for channel " + c};
    }
    if (q.receives.size() > q.sends.size()) {
      return {false, std::nullopt,
              "receive " + q.receives[q.sends.size()].to_string() + " on " + c +
                  " has no matching send"};
    }
    unsigned k = cap->second.value();
    rules.insert_or_assign(c, Capacity::exact(k == 0 ? 1 : k));
    if (k == 0) {
      // A rendezvous executes as a send immediately followed by its receive.
      for (const auto& p : q.pairs()) {
        auto si = std::find_if(e.order.begin(), e.order.end(),
                               [&](const ExecEvent& x) { return x.event == p.send; });
        if (si + 1 == e.order.end() || !((si + 1)->event == p.receive)) {
          return {false, std::nullopt,
                  "rendezvous " + p.send.to_string() + " -> " +
                      p.receive.to_string() + " on " + c + " is not adjacent"};
        }
      }
    }
  }
  hb = apply_channel_rules(hb, induced, rules);
  if (auto cyc = detect_cycle(hb)) {
    v.legal = false;
    v.cycle = cyc;
    v.reason = "happens-before cycle";
  }
  return v;
}

// ------------------------------------------------------------------ races

std::string RaceViolation::to_string() const {
  return receive.to_string() + " on " + channel + " expected " +
         expected_send.to_string() + ", " +
         (actual_send ? "received from " + actual_send->to_string()
                      : std::string("received nothing"));
}

RaceVerdict classify_race(const SequentialExecution& e, const CbOrder& cb) {
  RaceVerdict v;
  std::set<EventRef> executed;
  for (const auto& x : e.order) executed.insert(x.event);
  auto triples = cb.triples();
  std::sort(triples.begin(), triples.end(),
            [](const CbTriple& a, const CbTriple& b) { return a.receive < b.receive; });
  for (const auto& t : triples) {
    std::optional<EventRef> actual;
    if (executed.count(t.receive)) actual = e.matching.send_of(t.receive);
    if (actual && *actual == t.send) continue;
    v.violations.push_back({t.receive, t.send, actual, t.channel.name});
  }
  v.race_free = v.violations.empty();
  for (const auto& x : v.violations) {
    if (x.actual_send) {
      v.witness = x;
      break;
    }
  }
  if (!v.witness && !v.violations.empty()) v.witness = v.violations.front();
  return v;
}

RaceVerdict classify_race(const SequentialExecution& e, const GlobalProtocol& g) {
  return classify_race(e, derive_orders(g).cb);
}

// ---------------------------------------------------------------- counting

std::uint64_t CountVector::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::string CountVector::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    s += (i ? ", " : "") + std::to_string(counts[i]);
  }
  return s + ")";
}

std::pair<std::uint64_t, CountVector> count_protocols(int n) {
  if (n < 1) throw std::invalid_argument("count_protocols needs n >= 1");
  // v[m] = protocols with m parties.
  std::vector<std::uint64_t> v(2 * n + 1, 0);
  v[2] = 1;
  for (int step = 2; step <= n; ++step) {
    std::vector<std::uint64_t> next(v.size(), 0);
    for (std::size_t m = 2; m < v.size(); ++m) {
      if (!v[m]) continue;
      next[m] += v[m] * m * (m - 1);           // both parties already present
      next[m + 1] += v[m] * 2 * m;             // one new party
      next[m + 2] += v[m];                     // two new parties
    }
    v = next;
  }
  CountVector cv;
  cv.counts.assign(v.begin() + 2, v.end());
  return {cv.total(), cv};
}

std::uint64_t brute_force_count(int n) {
  if (n < 1) throw std::invalid_argument("brute_force_count needs n >= 1");
  if (n > 3) throw std::invalid_argument("brute_force_count supports n <= 3");
  const int pool = 2 * n;
  std::set<std::vector<int>> classes;
  std::vector<int> seq(2 * n, 0);
  std::function<void(int)> rec = [&](int t) {
    if (t == n) {
      std::map<int, int> rename;
      std::vector<int> canon;
      for (int p : seq) {
        auto it = rename.emplace(p, static_cast<int>(rename.size())).first;
        canon.push_back(it->second);
      }
      classes.insert(canon);
      return;
    }
    for (int a = 0; a < pool; ++a) {
      for (int b = 0; b < pool; ++b) {
        if (a == b) continue;
        seq[2 * t] = a;
        seq[2 * t + 1] = b;
        rec(t + 1);
      }
    }
  };
  rec(0);
  return classes.size();
}

// ------------------------------------------------------ HB-CB discrepancy

std::string HbCbAnalysis::to_string() const {
  std::ostringstream os;
  auto list = [](const std::vector<EventRef>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].to_string();
    return s + "]";
  };
  for (const auto& [c, ok] : isotone) {
    os << "channel " << c << ": sends " << list(send_order.at(c)) << ", receives "
       << list(recv_order.at(c)) << ", isotone " << (ok ? "yes" : "no") << "\n";
  }
  os << "HB-CB analysis concludes: "
     << (analysis_race_free ? "race-free" : "not race-free") << "\n";
  os << "oracle: " << (oracle_racy ? "racy execution found" : "no racy execution")
     << "\n";
  if (witness) os << witness->dump();
  os << "discrepancy: " << (discrepancy ? "yes" : "no") << "\n";
  return os.str();
}

HbCbAnalysis analyze_hb_cb(const GlobalProtocol& g, unsigned any_capacity) {
  HbCbAnalysis out;
  Orders o = derive_orders(g);
  HbOrder hb = apply_propagation(o.hb, o.cb, PropagationRule::kHbCb);

  ExecModel model = model_of(g, any_capacity);
  auto execs = enumerate_executions(model, model.events.size());
  auto exec_before = [&](const EventRef& x, const EventRef& y) {
    bool any = false;
    for (const auto& e : execs) {
      auto px = std::find_if(e.order.begin(), e.order.end(),
                             [&](const ExecEvent& v) { return v.event == x; });
      auto py = std::find_if(e.order.begin(), e.order.end(),
                             [&](const ExecEvent& v) { return v.event == y; });
      if (py == e.order.end()) continue;
      if (px == e.order.end() || px > py) return false;
      any = true;
    }
    return any;
  };
  auto before = [&](const EventRef& x, const EventRef& y) {
    if (event_happens_before(hb, x, y)) return true;
    if (event_happens_before(hb, y, x)) return false;
    return exec_before(x, y);
  };
  // Linear order by repeatedly taking an element nothing else precedes.
  auto linearize = [&](std::vector<EventRef> xs) -> std::optional<std::vector<EventRef>> {
    std::vector<EventRef> res;
    while (!xs.empty()) {
      std::vector<std::size_t> minimal;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        bool min = true;
        for (std::size_t j = 0; j < xs.size() && min; ++j) {
          if (i != j && before(xs[j], xs[i])) min = false;
        }
        if (min) minimal.push_back(i);
      }
      if (minimal.size() != 1) return std::nullopt;
      res.push_back(xs[minimal[0]]);
      xs.erase(xs.begin() + minimal[0]);
    }
    return res;
  };

  out.analysis_race_free = true;
  for (const auto& c : channels_of(g)) {
    std::vector<EventRef> sends, recvs;
    for (const auto& t : o.cb.triples()) {
      if (t.channel.name != c.name) continue;
      sends.push_back(t.send);
      recvs.push_back(t.receive);
    }
    auto so = linearize(sends);
    auto ro = linearize(recvs);
    out.send_order[c.name] = so.value_or(sends);
    out.recv_order[c.name] = ro.value_or(recvs);
    bool iso = so && ro && check_isotone(o.cb, *so, *ro);
    out.isotone[c.name] = iso;
    out.analysis_race_free = out.analysis_race_free && iso;
  }
  RaceSearch rs = find_races(model);
  out.oracle_racy = rs.racy > 0;
  out.witness = rs.witness;
  out.discrepancy = out.analysis_race_free && out.oracle_racy;
  return out;
}

// ---------------------------------------------------- canonical programs

CanonicalImplementation canonical_implementation(const GlobalProtocol& g,
                                                 unsigned any_capacity) {
  CanonicalImplementation out;
  ProjectionContext ctx(g);
  std::set<std::string> names;
  for (const auto& c : channels_of(g)) names.insert(c.name);
  for (const auto& p : parties_of(g)) names.insert(p.name);

  std::ostringstream src;
  src << "package main\n\n";
  for (const auto& c : channels_of(g)) {
    unsigned k = c.capacity.is_any() ? any_capacity : c.capacity.value();
    src << "var " << c.name << " = make(chan int, " << k << ")\n";
  }
  std::map<std::string, std::string> fresh;
  int n = 0;
  for (const auto& r : ctx.guards()) {
    if (!r.rendezvous) continue;
    std::string name;
    do {
      name = "gd" + std::to_string(++n);
    } while (names.count(name));
    names.insert(name);
    fresh[r.channel.name] = name;
    out.bindings.fresh_to_channel[r.channel.name] = name;
    src << "var " << name << " = make(chan int, 0)\n";
  }
  src << "\nfunc main() {\n";
  for (const auto& p : parties_of(g)) src << "\tgo " << p.name << "()\n";
  src << "}\n";
  for (const auto& p : parties_of(g)) {
    src << "\nfunc " << p.name << "() {\n";
    project_party(g, p, ctx).for_each_leaf([&](const PartyLeaf& l) {
      if (auto* s = std::get_if<PartySend>(&l)) {
        auto f = fresh.find(s->channel.name);
        src << "\t" << (f == fresh.end() ? s->channel.name : f->second) << " <- 0\n";
      } else if (auto* r = std::get_if<PartyRecv>(&l)) {
        auto f = fresh.find(r->channel.name);
        src << "\t<-" << (f == fresh.end() ? r->channel.name : f->second) << "\n";
      }
    });
    src << "}\n";
  }
  out.source = src.str();
  out.program = parse_program(out.source, "canonical.go");
  return out;
}

}  // namespace chanrace
