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

#include "chanrace/verifier.hh"

#include <algorithm>
#include <functional>
#include <future>

namespace chanrace {

namespace {

using PE = PerEndpointProtocol;

struct Consumed {
  EndpointLeaf head;
  PE rest;
};

// Removes the first head leaf (left branch first) accepted by pred.
std::optional<Consumed> consume(const PE& t,
                                const std::function<bool(const EndpointLeaf&)>& pred) {
  switch (t.kind()) {
    case PE::Kind::kEmp:
      return std::nullopt;
    case PE::Kind::kLeaf:
      if (pred(t.value())) return Consumed{t.value(), PE::emp()};
      return std::nullopt;
    case PE::Kind::kSeq: {
      if (t.left().is_emp()) return consume(t.right(), pred);
      auto c = consume(t.left(), pred);
      if (!c) return std::nullopt;
      return Consumed{c->head, normalize(PE::seq(c->rest, t.right()))};
    }
    case PE::Kind::kPar: {
      if (auto c = consume(t.left(), pred)) {
        return Consumed{c->head, normalize(PE::par(c->rest, t.right()))};
      }
      if (auto c = consume(t.right(), pred)) {
        return Consumed{c->head, normalize(PE::par(t.left(), c->rest))};
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<EndpointLeaf> heads(const PE& t) {
  switch (t.kind()) {
    case PE::Kind::kEmp:
      return {};
    case PE::Kind::kLeaf:
      return {t.value()};
    case PE::Kind::kSeq:
      return t.left().is_emp() ? heads(t.right()) : heads(t.left());
    case PE::Kind::kPar: {
      auto l = heads(t.left());
      auto r = heads(t.right());
      l.insert(l.end(), r.begin(), r.end());
      return l;
    }
  }
  return {};
}

// Finds guard(e) leaves that still have a send or receive before them.
struct GuardScan {
  bool comm = false;
  bool guard = false;
  bool early = false;
};

GuardScan scan_guard(const PE& t, const EventRef& e) {
  switch (t.kind()) {
    case PE::Kind::kEmp:
      return {};
    case PE::Kind::kLeaf: {
      auto* g = std::get_if<EndpointGuard>(&t.value());
      return {g == nullptr, g && g->event == e, false};
    }
    case PE::Kind::kSeq:
    case PE::Kind::kPar: {
      GuardScan l = scan_guard(t.left(), e);
      GuardScan r = scan_guard(t.right(), e);
      bool early = l.early || r.early || (t.is_seq() && l.comm && r.guard);
      return {l.comm || r.comm, l.guard || r.guard, early};
    }
  }
  return {};
}

// A guard on the receiving side of a rendezvous orders the rendezvous
// receive before the guarded event, so the event may not happen while that
// receive is still pending on another endpoint.
std::optional<std::string> premature(const Assertion& a, const std::string& ch,
                                     const EventRef& e) {
  for (const auto& [name, z] : a.endpoint_state) {
    if (name != ch && scan_guard(z, e).early) {
      return "event " + e.to_string() + " would happen before endpoint " + name +
             " reaches guard(" + e.to_string() + ")";
    }
  }
  return std::nullopt;
}

std::string describe_heads(const PE& t) {
  auto hs = heads(t);
  if (hs.empty()) return "emp";
  std::string s;
  for (const auto& h : hs) s += (s.empty() ? "" : ", ") + render_leaf(h);
  return s;
}

bool holds(const Assertion& a, const DelegatedEndpoint& d) {
  auto it = a.endpoint_state.find(d.channel.name);
  if (it != a.endpoint_state.end() &&
      normalize(it->second) == normalize(d.protocol)) {
    return true;
  }
  return std::find(a.delegated_in.begin(), a.delegated_in.end(), d) !=
         a.delegated_in.end();
}

void release(Assertion& a, const DelegatedEndpoint& d) {
  auto it = std::find(a.delegated_in.begin(), a.delegated_in.end(), d);
  if (it != a.delegated_in.end()) {
    a.delegated_in.erase(it);
  } else {
    a.endpoint_state.erase(d.channel.name);
  }
}

}  // namespace

std::string Assertion::to_string() const {
  std::string s;
  for (const auto& [c, p] : endpoint_state) {
    s += (s.empty() ? "" : " | ") + c + ": " + render_endpoint(p);
  }
  if (s.empty()) s = "emp";
  for (const auto& d : delegated_in) {
    s += " | held " + d.channel.name + ": " + render_endpoint(d.protocol);
  }
  s += " ; known {";
  bool first = true;
  for (const auto& e : known_events) {
    s += (first ? "" : ", ") + e.to_string();
    first = false;
  }
  return s + "}";
}

StepResult step(const Assertion& a, const Stmt& s) {
  if (!s.is_channel_op()) return {std::nullopt, "not a channel operation"};
  const std::string ch = s.channel();
  auto it = a.endpoint_state.find(ch);
  if (it == a.endpoint_state.end()) {
    return {std::nullopt, "no endpoint protocol for channel " + ch};
  }
  const PE& proto = it->second;
  Assertion post = a;

  if (auto* send = std::get_if<SendStmt>(&s.op)) {
    std::optional<Consumed> c;
    if (send->payload_is_channel) {
      c = consume(proto, [&](const EndpointLeaf& l) {
        auto* x = std::get_if<EndpointSend>(&l);
        return x && x->payload && x->payload->channel.name == send->payload &&
               holds(a, *x->payload);
      });
    }
    if (!c) {
      c = consume(proto, [](const EndpointLeaf& l) {
        auto* x = std::get_if<EndpointSend>(&l);
        return x && !x->payload;
      });
    }
    if (!c) {
      return {std::nullopt, "expected a send at the head of endpoint " + ch +
                                ", found " + describe_heads(proto)};
    }
    const auto& head = std::get<EndpointSend>(c->head);
    if (auto why = premature(a, ch, head.event)) return {std::nullopt, *why};
    if (head.payload) release(post, *head.payload);
    post.endpoint_state[ch] = c->rest;
    post.known_events.insert(head.event);
    return {post, ""};
  }

  auto c = consume(proto, [](const EndpointLeaf& l) {
    return std::holds_alternative<EndpointRecv>(l);
  });
  if (!c) {
    return {std::nullopt, "expected a receive at the head of endpoint " + ch +
                              ", found " + describe_heads(proto)};
  }
  const auto& head = std::get<EndpointRecv>(c->head);
  if (auto why = premature(a, ch, head.event)) return {std::nullopt, *why};
  post.endpoint_state[ch] = c->rest;
  post.known_events.insert(head.event);
  if (head.payload) post.delegated_in.push_back(*head.payload);
  return {post, ""};
}

Assertion prove_guards(const Assertion& a, const std::string& endpoint) {
  Assertion out = a;
  auto it = out.endpoint_state.find(endpoint);
  if (it == out.endpoint_state.end()) return out;
  for (;;) {
    auto c = consume(it->second, [&](const EndpointLeaf& l) {
      auto* g = std::get_if<EndpointGuard>(&l);
      return g && out.known_events.count(g->event) > 0;
    });
    if (!c) break;
    it->second = c->rest;
  }
  return out;
}

Assertion prove_guards(const Assertion& a) {
  Assertion out = a;
  // Guards add no events, so one pass per endpoint reaches the fixpoint.
  for (const auto& [c, p] : a.endpoint_state) out = prove_guards(out, c);
  return out;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::kSuccess: return "success";
    case Outcome::kFailPrecondition: return "fail_precondition";
    case Outcome::kFailUnconsumed: return "fail_unconsumed";
  }
  return "?";
}

PartyReport finalize(const Assertion& a, const PartyId& p) {
  PartyReport r;
  r.party = p;
  r.function = p.name;
  r.final_assertion = prove_guards(a);
  r.residue = unproject(r.final_assertion.endpoint_state, p);
  r.outcome = r.residue.is_emp() && r.final_assertion.delegated_in.empty()
                  ? Outcome::kSuccess
                  : Outcome::kFailUnconsumed;
  return r;
}

void Bindings::add(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw InputError("binding must look like X=Y: '" + spec + "'");
  }
  std::string k = spec.substr(0, eq), v = spec.substr(eq + 1);
  auto& target = k[0] == '~' ? fresh_to_channel : party_to_function;
  if (!target.emplace(k, v).second) {
    throw InputError("duplicate binding for '" + k + "'");
  }
}

bool GlobalResidue::success() const {
  return std::all_of(parties.begin(), parties.end(), [](const PartyReport& r) {
    return r.outcome == Outcome::kSuccess;
  });
}

std::string GlobalResidue::to_string(const Program* prog) const {
  std::string out;
  for (const auto& r : parties) {
    out += r.party.name;
    if (r.function != r.party.name) out += " (func " + r.function + ")";
    out += ": " + chanrace::to_string(r.outcome);
    if (r.failure_loc) {
      out += " at " +
             (prog ? prog->where(*r.failure_loc)
                   : "line " + std::to_string(r.failure_loc->line)) +
             " `" + r.failure_stmt + "`: " + r.failure_reason;
    }
    out += "\n  residue: " + r.residue.to_string();
    out += "\n  final: " + r.final_assertion.to_string() + "\n";
  }
  std::string global;
  for (const auto& r : parties) {
    if (r.residue.is_emp()) continue;
    global += (global.empty() ? "" : " || ") + r.party.name + ": {" +
              r.residue.to_string() + "}";
  }
  out += "global residue: " + (global.empty() ? std::string("emp") : global) + "\n";
  out += std::string("verdict: ") + (success() ? "success" : "failure") + "\n";
  return out;
}

// ------------------------------------------------------------------ verify

namespace {

PartyReport verify_party(const PartyId& party, const std::string& function,
                         const std::vector<Stmt>& steps, Assertion entry,
                         GuardStrategy strategy) {
  std::vector<AssertionSnapshot> trace;
  auto snap = [&trace](const std::string& label, SourceLoc loc,
                       const Assertion& a) {
    if (!trace.empty() && trace.back().assertion == a) return;
    trace.push_back({label, loc, a});
  };

  Assertion cur = entry;
  if (strategy == GuardStrategy::kEager) cur = prove_guards(cur);
  snap("entry", {}, cur);

  std::optional<std::size_t> failed;
  std::string reason;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Stmt& s = steps[i];
    if (strategy == GuardStrategy::kOnDemand) {
      cur = prove_guards(cur, s.channel());
      snap("pre " + s.to_string(), s.loc, cur);
    }
    StepResult r = step(cur, s);
    if (!r.ok()) {
      failed = i;
      reason = r.failure;
      break;
    }
    cur = *r.post;
    snap("post " + s.to_string(), s.loc, cur);
    if (strategy == GuardStrategy::kEager) {
      cur = prove_guards(cur);
      snap("proved", s.loc, cur);
    }
  }

  PartyReport rep = finalize(cur, party);
  rep.function = function;
  if (failed) {
    rep.outcome = Outcome::kFailPrecondition;
    rep.failure_loc = steps[*failed].loc;
    rep.failure_stmt = steps[*failed].to_string();
    rep.failure_reason = reason;
    snap("failure", steps[*failed].loc, rep.final_assertion);
  } else {
    snap("final", {}, rep.final_assertion);
  }
  rep.trace = std::move(trace);
  return rep;
}

// Which functions send / receive on which channels.
struct Usage {
  std::map<std::string, std::set<std::string>> sends, recvs;

  explicit Usage(const std::vector<PartyTrace>& traces) {
    for (const auto& t : traces) {
      for (const auto& s : t.steps) {
        (s.is_send() ? sends : recvs)[t.party.name].insert(s.channel());
      }
    }
  }

  bool sends_on(const std::string& f, const std::string& c) const {
    auto it = sends.find(f);
    return it != sends.end() && it->second.count(c);
  }
  bool recvs_on(const std::string& f, const std::string& c) const {
    auto it = recvs.find(f);
    return it != recvs.end() && it->second.count(c);
  }
};

std::string function_for(const Bindings& b, const PartyId& p) {
  auto it = b.party_to_function.find(p.name);
  return it == b.party_to_function.end() ? p.name : it->second;
}

}  // namespace

std::map<std::string, std::string> bind_fresh_channels(
    const Program& prog, const GlobalProtocol& g, const ProjectionContext& ctx,
    const Bindings& bindings) {
  std::map<std::string, std::string> out;
  std::set<std::string> taken;
  for (const auto& [fresh, chan] : bindings.fresh_to_channel) {
    if (!ctx.is_fresh(fresh)) {
      throw InputError("binding for unknown guard channel '" + fresh + "'");
    }
    const ChannelDecl* d = prog.channel(chan);
    if (!d) throw InputError("binding " + fresh + "=" + chan + ": no such channel");
    if (d->capacity != 0) {
      throw InputError("guard channel " + fresh + " must bind to an unbuffered channel, " +
                       chan + " has capacity " + std::to_string(d->capacity));
    }
    out[fresh] = chan;
    taken.insert(chan);
  }

  std::set<std::string> protocol_channels;
  for (const auto& c : channels_of(g)) protocol_channels.insert(c.name);
  std::vector<std::string> candidates;
  for (const auto& d : prog.channels) {
    if (d.capacity == 0 && !protocol_channels.count(d.name) && !taken.count(d.name)) {
      candidates.push_back(d.name);
    }
  }
  std::vector<const GuardRendezvous*> open;
  for (const auto& r : ctx.guards()) {
    if (r.rendezvous && !out.count(r.channel.name)) open.push_back(&r);
  }
  if (open.empty() || candidates.empty()) return out;

  Usage usage(extract_parties(prog));
  auto score = [&](const GuardRendezvous& r, const std::string& c) {
    return int(usage.sends_on(function_for(bindings, r.guard.lhs.party), c)) +
           int(usage.recvs_on(function_for(bindings, r.guard.rhs.party), c));
  };

  // choice[i] = candidate index or -1.
  std::vector<int> best(open.size(), -1), cur(open.size(), -1);
  int best_score = 0;
  if (open.size() <= 8) {
    std::vector<char> used(candidates.size(), 0);
    std::function<void(std::size_t, int)> search = [&](std::size_t i, int acc) {
      if (i == open.size()) {
        if (acc > best_score) {
          best_score = acc;
          best = cur;
        }
        return;
      }
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (used[c]) continue;
        int s = score(*open[i], candidates[c]);
        if (s == 0) continue;
        used[c] = 1;
        cur[i] = static_cast<int>(c);
        search(i + 1, acc + s);
        used[c] = 0;
      }
      cur[i] = -1;
      search(i + 1, acc);
    };
    search(0, 0);
  } else {
    std::vector<char> used(candidates.size(), 0);
    for (std::size_t i = 0; i < open.size(); ++i) {
      int top = 0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        int s = used[c] ? 0 : score(*open[i], candidates[c]);
        if (s > top) {
          top = s;
          best[i] = static_cast<int>(c);
        }
      }
      if (best[i] >= 0) used[best[i]] = 1;
    }
  }
  for (std::size_t i = 0; i < open.size(); ++i) {
    if (best[i] >= 0) out[open[i]->channel.name] = candidates[best[i]];
  }
  return out;
}

GlobalResidue verify(const Program& prog, const GlobalProtocol& g,
                     const VerifyOptions& opts) {
  for (const auto& c : channels_of(g)) {
    const ChannelDecl* d = prog.channel(c.name);
    if (!d) {
      throw InputError("protocol channel '" + c.name +
                       "' is not declared by the program");
    }
    if (!c.capacity.is_any() && c.capacity.value() != d->capacity) {
      throw InputError("channel '" + c.name + "' has capacity " +
                       std::to_string(d->capacity) + " in the program but " +
                       c.capacity.to_string() + " in the protocol");
    }
  }
  for (const auto& [party, fn] : opts.bindings.party_to_function) {
    bool known = false;
    for (const auto& p : parties_of(g)) known = known || p.name == party;
    if (!known) throw InputError("binding for unknown protocol party '" + party + "'");
  }

  ProjectionContext ctx(g);
  auto rename = bind_fresh_channels(prog, g, ctx, opts.bindings);
  auto traces = extract_parties(prog);
  std::map<std::string, const PartyTrace*> by_function;
  for (const auto& t : traces) by_function[t.party.name] = &t;

  struct Job {
    PartyId party;
    std::string function;
    std::vector<Stmt> steps;
    Assertion entry;
  };
  std::vector<Job> jobs;
  std::set<std::string> bound;
  for (const auto& p : parties_of(g)) {
    std::string fn = function_for(opts.bindings, p);
    auto it = by_function.find(fn);
    if (it == by_function.end()) {
      throw InputError("protocol party '" + p.name +
                       "' has no program party (expected func " + fn + ")");
    }
    if (!bound.insert(fn).second) {
      throw InputError("func " + fn + " is bound to more than one protocol party");
    }
    Assertion entry;
    for (auto& [c, proto] : project_endpoints(project_party(g, p, ctx))) {
      auto r = rename.find(c);
      entry.endpoint_state[r == rename.end() ? c : r->second] = proto;
    }
    jobs.push_back({p, fn, it->second->steps, entry});
  }
  // Program parties outside the protocol must behave as emp.
  for (const auto& t : traces) {
    if (!bound.count(t.party.name)) {
      jobs.push_back({t.party, t.party.name, t.steps, Assertion{}});
    }
  }

  std::vector<std::future<PartyReport>> futures;
  for (const auto& j : jobs) {
    futures.push_back(std::async(std::launch::async, [&j, &opts] {
      return verify_party(j.party, j.function, j.steps, j.entry, opts.strategy);
    }));
  }
  GlobalResidue out;
  out.channel_binding = rename;
  for (auto& f : futures) out.parties.push_back(f.get());
  return out;
}

}  // namespace chanrace
