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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chanrace/exec_oracle.hh"
#include "chanrace/projection.hh"
#include "chanrace/transform.hh"
#include "chanrace/verifier.hh"
#include "support/gen.hh"

using namespace chanrace;
using chanrace::testing::read_data;

namespace {

struct Check {
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  template <class A, class B>
  void equal(const A& got, const B& want, const std::string& what) {
    if (!(got == want)) {
      std::ostringstream os;
      os << what << ": got [" << got << "] want [" << want << "]";
      problems.push_back(os.str());
    }
  }
};

// Restricted growth strings of length 2n where the two parties of each
// transmission differ; counted directly, no relabelling.
std::uint64_t rgs_count(int n) {
  std::uint64_t count = 0;
  std::vector<int> s(2 * n);
  std::function<void(int, int)> go = [&](int pos, int max) {
    if (pos == 2 * n) {
      ++count;
      return;
    }
    for (int v = 0; v <= max + 1; ++v) {
      if (pos % 2 == 1 && v == s[pos - 1]) continue;
      s[pos] = v;
      go(pos + 1, std::max(max, v));
    }
  };
  go(0, -1);
  return count;
}

GlobalProtocol load(const std::string& name) { return load_protocol(read_data(name)); }

Program program(const std::string& name) { return parse_program(read_data(name), name); }

const PartyReport& report_of(const GlobalResidue& r, const std::string& party) {
  for (const auto& p : r.parties) {
    if (p.party.name == party) return p;
  }
  throw std::runtime_error("no report for " + party);
}

std::vector<std::string> trace_text(const PartyReport& p) {
  std::vector<std::string> out;
  for (const auto& s : p.trace) out.push_back(s.assertion.to_string());
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += x + "\n";
  return s;
}

// ------------------------------------------------------------------ 1
Check counting_table() {
  Check c;
  const std::uint64_t want[] = {1, 7, 87, 1657};
  for (int n = 1; n <= 4; ++n) {
    c.equal(count_protocols(n).first, want[n - 1], "count_protocols(" + std::to_string(n) + ")");
    c.equal(count_protocols(n).second.total(), want[n - 1], "vector total n=" + std::to_string(n));
    c.equal(rgs_count(n), want[n - 1], "restricted growth oracle n=" + std::to_string(n));
  }
  for (int n = 1; n <= 3; ++n) {
    c.equal(brute_force_count(n), want[n - 1], "brute_force_count(" + std::to_string(n) + ")");
  }
  return c;
}

// ------------------------------------------------------------------ 2
Check golden_success() {
  Check c;
  GlobalProtocol g = load("guarded.gp");
  Program prog = program("verified.go");
  GlobalResidue r = verify(prog, g);
  c.expect(r.success(), "verification did not succeed:\n" + r.to_string(&prog));
  c.equal(r.channel_binding.at("~g1"), "d", "binding of ~g1");
  c.equal(r.channel_binding.at("~g2"), "e", "binding of ~g2");
  // Expected assertions along each party of verified.go.
  std::map<std::string, std::vector<std::string>> want{
      {"A",
       {"c: !A.1 | d: guard(A.1) ; !A.1.1 ; known {}",
        "c: emp | d: guard(A.1) ; !A.1.1 ; known {A.1}",
        "c: emp | d: !A.1.1 ; known {A.1}",
        "c: emp | d: emp ; known {A.1, A.1.1}"}},
      {"B",
       {"c: ?B.1 ; !B.2 | d: ?B.1.1 ; guard(B.2) | e: guard(B.1) ; !B.1.2 ; known {}",
        "c: !B.2 | d: ?B.1.1 ; guard(B.2) | e: guard(B.1) ; !B.1.2 ; known {B.1}",
        "c: !B.2 | d: guard(B.2) | e: guard(B.1) ; !B.1.2 ; known {B.1, B.1.1}",
        "c: !B.2 | d: guard(B.2) | e: !B.1.2 ; known {B.1, B.1.1}",
        "c: !B.2 | d: guard(B.2) | e: emp ; known {B.1, B.1.1, B.1.2}",
        "c: emp | d: guard(B.2) | e: emp ; known {B.1, B.1.1, B.1.2, B.2}",
        "c: emp | d: emp | e: emp ; known {B.1, B.1.1, B.1.2, B.2}"}},
      {"C",
       {"c: ?C.2 | e: ?C.1.2 ; guard(C.2) ; known {}",
        "c: ?C.2 | e: guard(C.2) ; known {C.1.2}",
        "c: emp | e: guard(C.2) ; known {C.1.2, C.2}",
        "c: emp | e: emp ; known {C.1.2, C.2}"}},
  };
  for (const auto& [party, lines] : want) {
    const auto& rep = report_of(r, party);
    c.equal(join(trace_text(rep)), join(lines), "assertions of " + party);
    c.expect(rep.residue.is_emp(), party + " residue not emp");
  }
  return c;
}

// ------------------------------------------------------------------ 3
Check golden_failure() {
  Check c;
  GlobalProtocol g = load("guarded.gp");
  Program prog = program("failed.go");
  GlobalResidue r = verify(prog, g);
  c.expect(!r.success(), "failed.go verified");
  const auto& a = report_of(r, "A");
  c.equal(to_string(a.outcome), "fail_precondition", "A outcome");
  c.equal(a.failure_stmt, "e <- 0", "A failing statement");
  c.equal(a.failure_loc ? a.failure_loc->line : 0, 15, "A failing line");
  c.equal(a.residue.to_string(), "d: !A.1.1", "A residue");
  c.equal(a.final_assertion.to_string(), "c: emp | d: !A.1.1 ; known {A.1}", "A final");
  const auto& b = report_of(r, "B");
  c.equal(to_string(b.outcome), "fail_unconsumed", "B outcome");
  c.equal(b.residue.to_string(), "c: !B.2 || d: guard(B.2) || e: !B.1.2", "B residue");
  c.equal(b.final_assertion.to_string(),
          "c: !B.2 | d: guard(B.2) | e: !B.1.2 ; known {B.1, B.1.1}", "B final");
  const auto& cc = report_of(r, "C");
  c.equal(to_string(cc.outcome), "success", "C outcome");
  c.expect(cc.residue.is_emp(), "C residue not emp");
  c.equal(cc.final_assertion.to_string(), "c: emp | e: emp ; known {C.1.2, C.2}", "C final");
  return c;
}

// ------------------------------------------------------------------ 4
Check transformation() {
  Check c;
  TransformReport simple = make_race_free(load("racy.gp"));
  c.expect(simple.output == load("guarded.gp"),
           "simple protocol: got " + render_expr(simple.output));
  c.equal(render_expr(simple.output), "A -c-> B ; [A.1 < B.2] ; [B.1 < C.2] ; B -c-> C",
          "simple protocol text");
  c.equal(simple.inserted_guards.size(), 2u, "simple protocol guard count");

  TransformReport three = make_race_free(load("three_senders.gp"));
  c.expect(three.output == load("three_senders_guarded.gp"),
           "three transmissions: got " + render_expr(three.output));
  std::vector<std::string> got;
  for (const auto& ig : three.inserted_guards) got.push_back(render_leaf(GlobalLeaf{ig.guard}));
  c.equal(join(got), join({"[A.1 < B.2]", "[B.1 < C.2]", "[B.2 < C.3]", "[C.2 < A.3]"}),
          "three transmissions guards");
  c.expect(simple.warnings.empty() && three.warnings.empty(), "unexpected warnings");
  return c;
}

// ------------------------------------------------------------------ 5
Check projection() {
  Check c;
  GlobalProtocol g = load("guarded.gp");
  ProjectionContext ctx(g);
  auto ev = [](const char* s) { return EventRef::parse(s); };
  Channel cc{"c", Capacity::any()};
  Channel d{"~g1", Capacity::exact(0)};
  Channel e{"~g2", Capacity::exact(0)};
  using T = PerPartyProtocol;
  auto send = [](Channel ch, EventRef x) { return T::leaf(PartySend{x, ch}); };
  auto recv = [](Channel ch, EventRef x) { return T::leaf(PartyRecv{ch, x}); };
  auto guard = [](Channel ch, EventRef x) { return T::leaf(PartyGuard{ch, x}); };

  T want_a = T::seq_of({send(cc, ev("A.1")), guard(d, ev("A.1")), send(d, ev("A.1.1"))});
  T want_b = T::seq_of({recv(cc, ev("B.1")), recv(d, ev("B.1.1")), guard(d, ev("B.2")),
                        guard(e, ev("B.1")), send(e, ev("B.1.2")), send(cc, ev("B.2"))});
  T want_c = T::seq_of({recv(e, ev("C.1.2")), guard(e, ev("C.2")), recv(cc, ev("C.2"))});
  T pa = project_party(g, PartyId{"A"}, ctx);
  T pb = project_party(g, PartyId{"B"}, ctx);
  T pc = project_party(g, PartyId{"C"}, ctx);
  c.expect(pa == want_a, "A: got " + render_party(pa));
  c.expect(pb == want_b, "B: got " + render_party(pb));
  c.expect(pc == want_c, "C: got " + render_party(pc));

  using Z = PerEndpointProtocol;
  Z want_ac = Z::leaf(EndpointSend{ev("A.1"), nullptr});
  Z want_ad = Z::seq(Z::leaf(EndpointGuard{ev("A.1")}), Z::leaf(EndpointSend{ev("A.1.1"), nullptr}));
  Z ac = project_endpoint(pa, "c");
  Z ad = project_endpoint(pa, "~g1");
  c.expect(ac == want_ac, "A/c: got " + render_endpoint(ac));
  c.expect(ad == want_ad, "A/d: got " + render_endpoint(ad));
  c.equal(ctx.fresh_channel_counter(), 2, "fresh channels");
  return c;
}

// ------------------------------------------------------------------ 6
Check oracle_counts() {
  Check c;
  GlobalProtocol g = load("racy.gp");
  auto execs = enumerate_executions(model_of(g));
  c.equal(execs.size(), 2u, "executions of the simple protocol");
  CapacityMap caps{{"c", Capacity::exact(1)}};
  int racy = 0, free = 0;
  for (const auto& e : execs) {
    c.expect(check_legal(e, caps).legal, "enumerated execution is illegal:\n" + e.dump());
    RaceVerdict v = classify_race(e, g);
    if (v.race_free) {
      ++free;
    } else {
      ++racy;
      c.expect(v.witness && v.witness->receive == EventRef::parse("C.2") &&
                   v.witness->actual_send == EventRef::parse("A.1"),
               "racy witness should be C.2 receiving from A.1");
    }
  }
  c.equal(racy, 1, "racy executions");
  c.equal(free, 1, "race-free executions");

  GlobalProtocol guarded = load("guarded.gp");
  auto gexecs = enumerate_executions(model_of(guarded));
  c.expect(!gexecs.empty(), "guarded protocol has no executions");
  for (const auto& e : gexecs) {
    c.expect(classify_race(e, guarded).race_free, "guarded execution racy:\n" + e.dump());
  }
  c.equal(find_races(model_of(guarded)).racy, 0u, "racy guarded executions");
  return c;
}

// ------------------------------------------------------------------ 7
Check legality() {
  Check c;
  CapacityMap caps{{"c", Capacity::exact(1)}};
  auto illegal = check_legal(parse_trace(read_data("illegal_exec.trace")), caps);
  c.expect(!illegal.legal, "illegal execution accepted");
  c.expect(illegal.cycle && !illegal.cycle->empty(), "no cycle witness");
  for (const char* name : {"race_free_exec.trace", "racy_exec.trace"}) {
    auto v = check_legal(parse_trace(read_data(name)), caps);
    c.expect(v.legal, std::string(name) + " rejected: " + v.reason);
  }
  return c;
}

// ------------------------------------------------------------------ 8
Check deadlock_screen() {
  Check c;
  auto cyc = screen_deadlock(load("guarded_cycle.gp"));
  c.expect(cyc.has_value(), "guarded cycle not flagged");
  if (cyc) {
    std::set<std::string> events;
    for (const auto& p : *cyc) events.insert(p.event.to_string());
    c.expect(events.count("B.1") && events.count("C.2"), "cycle misses B.1 or C.2");
  }
  c.expect(!screen_deadlock(load("guarded.gp")), "guarded protocol flagged");
  return c;
}

// ------------------------------------------------------------------ 9
Check hb_cb_discrepancy() {
  Check c;
  HbCbAnalysis a = analyze_hb_cb(load("racy.gp"));
  c.expect(a.isotone.count("c") && a.isotone.at("c"), "channel c not isotone");
  c.expect(a.analysis_race_free, "analysis did not conclude race-free");
  c.expect(a.oracle_racy, "oracle found no racy execution");
  c.expect(a.witness && check_legal(*a.witness, {{"c", Capacity::exact(1)}}).legal,
           "witness missing or illegal");
  c.expect(a.discrepancy, "discrepancy not reported");
  return c;
}

// ----------------------------------------------------------------- 10
bool cycle_has_guard(const HbOrder& hb, const std::vector<EventPoint>& cyc) {
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    const auto& from = cyc[i];
    const auto& to = cyc[(i + 1) % cyc.size()];
    for (const auto& e : hb.edges()) {
      if (e.label == EdgeLabel::kGuardAsserted && e.from == from && e.to == to) return true;
    }
  }
  return false;
}

// Every matched pair on an unbuffered channel is a send immediately followed
// by its receive.
bool rendezvous_adjacent(const SequentialExecution& e, const ExecModel& m) {
  std::map<std::string, std::vector<std::size_t>> pending;
  for (std::size_t i = 0; i < e.order.size(); ++i) {
    const auto& x = e.order[i];
    if (m.capacities.at(x.channel).value() != 0) continue;
    if (x.kind == EventKind::kSend) {
      if (i + 1 >= e.order.size()) return false;
      const auto& y = e.order[i + 1];
      if (y.kind != EventKind::kReceive || y.channel != x.channel ||
          y.event.party == x.event.party) {
        return false;
      }
    } else if (i == 0 || e.order[i - 1].kind != EventKind::kSend ||
               e.order[i - 1].channel != x.channel) {
      return false;
    }
  }
  return true;
}

Check properties(std::string& summary) {
  Check c;
  const int kWanted = 500;
  chanrace::testing::GenOptions opts;

  // (a) cycles only through guards.
  opts.max_guards = 2;
  chanrace::testing::ProtocolGenerator with_guards(1234, opts);
  int cyclic = 0;
  for (int i = 0; i < kWanted; ++i) {
    auto gen = with_guards.next();
    Orders o = derive_orders(gen.protocol);
    if (auto cyc = detect_cycle(o.hb)) {
      ++cyclic;
      if (!cycle_has_guard(o.hb, *cyc)) c.expect(false, "(a) guard-free cycle in\n" + gen.text);
    }
    HbOrder cbhb = apply_propagation(o.hb, o.cb, PropagationRule::kCbHb);
    if (guards_of(gen.protocol).empty() && detect_cycle(cbhb)) {
      c.expect(false, "(a) CB-HB cycle without guards in\n" + gen.text);
    }
  }

  // (b), (c), (d) on guard-free protocols.
  opts.max_guards = 0;
  chanrace::testing::ProtocolGenerator plain(98765, opts);
  int eligible = 0, drawn = 0, verified = 0, traces = 0;
  while (eligible < kWanted || drawn < kWanted) {
    auto gen = plain.next();
    ++drawn;
    const GlobalProtocol& g = gen.protocol;

    // (c)
    GlobalProtocol n1 = normalize(g);
    if (!(normalize(n1) == n1)) c.expect(false, "(c) normalize not idempotent:\n" + gen.text);
    if (!(index_transmissions(g) == g)) c.expect(false, "(c) reindexing changed\n" + gen.text);
    if (!(load_protocol(render_protocol(g)) == g)) {
      c.expect(false, "(c) render/parse roundtrip changed\n" + gen.text);
    }

    // (d)
    ExecModel m = model_of(g);
    for (const auto& e : enumerate_executions(m, 16)) {
      ++traces;
      if (!rendezvous_adjacent(e, m)) {
        c.expect(false, "(d) non-adjacent rendezvous in\n" + gen.text + e.dump());
      }
    }

    // (b)
    if (eligible >= kWanted) continue;
    TransformReport rep = make_race_free(g);
    if (!rep.warnings.empty()) continue;
    ++eligible;
    CanonicalImplementation impl = canonical_implementation(rep.output);
    VerifyOptions vo;
    vo.bindings = impl.bindings;
    if (!verify(impl.program, rep.output, vo).success()) continue;
    ++verified;
    RaceSearch rs = find_races(model_of(impl.program, &rep.output, impl.bindings));
    if (rs.racy != 0) {
      c.expect(false, "(b) verified canonical implementation has " +
                          std::to_string(rs.racy) + " racy executions:\n" +
                          render_protocol(rep.output) + impl.source +
                          (rs.witness ? rs.witness->dump() : ""));
    }
  }
  summary = std::to_string(drawn) + " generated, " + std::to_string(eligible) +
            " eligible for (b), " + std::to_string(verified) + " verified, " +
            std::to_string(traces) + " traces, " + std::to_string(cyclic) +
            " guarded protocols with cycles";
  return c;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&failed](int id, const char* name, const Check& c,
                          const std::string& extra = "") {
    std::printf("%s %2d %s%s\n", c.problems.empty() ? "PASS" : "FAIL", id, name,
                extra.empty() ? "" : ("  (" + extra + ")").c_str());
    for (std::size_t i = 0; i < c.problems.size() && i < 5; ++i) {
      std::printf("     %s\n", c.problems[i].c_str());
    }
    if (!c.problems.empty()) ++failed;
  };
  auto guarded = [&](int id, const char* name, auto fn) {
    try {
      report(id, name, fn());
    } catch (const std::exception& e) {
      Check c;
      c.problems.push_back(std::string("exception: ") + e.what());
      report(id, name, c);
    }
  };
  guarded(1, "counting table", counting_table);
  guarded(2, "golden verification success", golden_success);
  guarded(3, "golden verification failure", golden_failure);
  guarded(4, "transformation golden", transformation);
  guarded(5, "projection goldens", projection);
  guarded(6, "oracle counts", oracle_counts);
  guarded(7, "legality", legality);
  guarded(8, "deadlock screening", deadlock_screen);
  guarded(9, "HB-CB discrepancy", hb_cb_discrepancy);
  try {
    std::string summary;
    Check c = properties(summary);
    report(10, "property suite", c, summary);
  } catch (const std::exception& e) {
    Check c;
    c.problems.push_back(std::string("exception: ") + e.what());
    report(10, "property suite", c);
  }
  std::fflush(stdout);
  return failed ? 1 : 0;
}
