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

#ifndef CHANRACE_VERIFIER_HH_
#define CHANRACE_VERIFIER_HH_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chanrace/program.hh"
#include "chanrace/projection.hh"
#include "chanrace/protocol.hh"

namespace chanrace {

struct Assertion {
  std::map<std::string, PerEndpointProtocol> endpoint_state;
  std::set<EventRef> known_events;
  std::vector<DelegatedEndpoint> delegated_in;

  // `c: !B.2 | d: guard(B.2) ; known {B.1, B.1.1}`
  std::string to_string() const;
  bool operator==(const Assertion&) const = default;
};

// Result of one Hoare step: the postcondition, or why the precondition failed.
struct StepResult {
  std::optional<Assertion> post;
  std::string failure;

  bool ok() const { return post.has_value(); }
};

StepResult step(const Assertion& a, const Stmt& s);

// Consumes provable guards at the head of every endpoint, to fixpoint.
Assertion prove_guards(const Assertion& a);
// Same, restricted to one endpoint.
Assertion prove_guards(const Assertion& a, const std::string& endpoint);

enum class GuardStrategy {
  kOnDemand,  // before using an endpoint, and at the end
  kEager,     // at entry and after every step
};

enum class Outcome { kSuccess, kFailPrecondition, kFailUnconsumed };

std::string to_string(Outcome o);

struct AssertionSnapshot {
  std::string label;  // entry, pre <stmt>, post <stmt>, failure, final
  SourceLoc loc;
  Assertion assertion;
};

struct PartyReport {
  PartyId party;
  std::string function;
  Outcome outcome = Outcome::kSuccess;
  std::optional<SourceLoc> failure_loc;
  std::string failure_stmt;
  std::string failure_reason;
  PartyResidue residue;
  Assertion final_assertion;
  // Distinct consecutive assertions along the party's trace.
  std::vector<AssertionSnapshot> trace;
};

PartyReport finalize(const Assertion& a, const PartyId& p);

struct Bindings {
  std::map<std::string, std::string> party_to_function;
  std::map<std::string, std::string> fresh_to_channel;

  // Accepts `A=funcA` or `~g1=d`.
  void add(const std::string& spec);
};

struct VerifyOptions {
  Bindings bindings;
  GuardStrategy strategy = GuardStrategy::kOnDemand;
};

struct GlobalResidue {
  std::vector<PartyReport> parties;
  // Fresh guard channel -> program channel actually used.
  std::map<std::string, std::string> channel_binding;

  bool success() const;
  std::string to_string(const Program* prog = nullptr) const;
};

/**
 * Fresh guard channels mapped to program channels: explicit bindings first,
 * then unbound rendezvous channels are matched against program-only
 * unbuffered channels by role agreement.
 */
std::map<std::string, std::string> bind_fresh_channels(
    const Program& prog, const GlobalProtocol& g, const ProjectionContext& ctx,
    const Bindings& bindings);

// Throws InputError on binding or capacity mismatches.
GlobalResidue verify(const Program& prog, const GlobalProtocol& g,
                     const VerifyOptions& opts = {});

}  // namespace chanrace

#endif  // CHANRACE_VERIFIER_HH_
