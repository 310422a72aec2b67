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

#ifndef CHANRACE_PROJECTION_HH_
#define CHANRACE_PROJECTION_HH_

#include <map>
#include <string>
#include <vector>

#include "chanrace/protocol.hh"

namespace chanrace {

// How one guard occurrence is realised after projection.
struct GuardRendezvous {
  HbGuard guard;
  Channel channel;        // fresh, unbuffered
  TransIndex inserted;    // index of the inserted send/receive events
  bool rendezvous = true; // false when lhs and rhs share a party

  EventRef send_event() const { return {guard.lhs.party, inserted}; }
  EventRef receive_event() const { return {guard.rhs.party, inserted}; }
};

/**
 * Fresh-channel allocation for all guards of one protocol, computed once so
 * that both sides of a guard agree on the channel. Guards are numbered in
 * left-to-right order; the n-th guard after transmission i gets the fresh
 * channel ~gK and inserted index i.n (0.n before any transmission).
 */
class ProjectionContext {
 public:
  ProjectionContext() = default;
  explicit ProjectionContext(const GlobalProtocol& g);

  int fresh_channel_counter() const { return counter_; }
  // In guard-occurrence order.
  const std::vector<GuardRendezvous>& guards() const { return guards_; }
  bool is_fresh(const std::string& channel) const;

 private:
  int counter_ = 0;
  std::vector<GuardRendezvous> guards_;
};

PerPartyProtocol project_party(const GlobalProtocol& g, const PartyId& p,
                               const ProjectionContext& ctx);
PerPartyProtocol project_party(const GlobalProtocol& g, const PartyId& p);

PerEndpointProtocol project_endpoint(const PerPartyProtocol& pi,
                                     const std::string& channel);

// Channels used by a per-party protocol, in first-appearance order.
std::vector<Channel> endpoints_of(const PerPartyProtocol& pi);

// Per-endpoint projections of every endpoint of pi.
std::map<std::string, PerEndpointProtocol> project_endpoints(
    const PerPartyProtocol& pi);

/**
 * Residue of one party: the concurrent composition of its unconsumed
 * endpoint protocols. Emp endpoints are dropped.
 */
struct PartyResidue {
  PartyId party;
  std::map<std::string, PerEndpointProtocol> endpoints;

  bool is_emp() const { return endpoints.empty(); }
  // `c: !B.2 || d: guard(B.2)`, or `emp`.
  std::string to_string() const;
  bool operator==(const PartyResidue&) const = default;
};

PartyResidue unproject(const std::map<std::string, PerEndpointProtocol>& residues,
                       const PartyId& p);

// `A: c!A.1 ; guard(~g1, A.1) ; ~g1!A.1.1`
std::string render_projection(const PartyId& p, const PerPartyProtocol& pi);

}  // namespace chanrace

#endif  // CHANRACE_PROJECTION_HH_
