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

#include "chanrace/projection.hh"

namespace chanrace {

ProjectionContext::ProjectionContext(const GlobalProtocol& g) {
  int base = 0;
  int since_base = 0;
  g.for_each_leaf([&](const GlobalLeaf& l) {
    if (auto* t = std::get_if<Transmission>(&l)) {
      if (!t->index || t->index->path.size() != 1) {
        throw std::invalid_argument("projection needs an indexed protocol");
      }
      base = t->index->path[0];
      since_base = 0;
      return;
    }
    const auto& gd = std::get<HbGuard>(l);
    GuardRendezvous r;
    r.guard = gd;
    r.channel = Channel{"~g" + std::to_string(++counter_), Capacity::exact(0)};
    r.inserted = TransIndex{{base, ++since_base}};
    r.rendezvous = gd.lhs.party != gd.rhs.party;
    guards_.push_back(r);
  });
}

bool ProjectionContext::is_fresh(const std::string& channel) const {
  for (const auto& g : guards_) {
    if (g.channel.name == channel) return true;
  }
  return false;
}

PerPartyProtocol project_party(const GlobalProtocol& g, const PartyId& p,
                               const ProjectionContext& ctx) {
  using PP = PerPartyProtocol;
  std::size_t ordinal = 0;
  PP out = g.transform<PartyLeaf>([&](const GlobalLeaf& l) -> PP {
    if (auto* t = std::get_if<Transmission>(&l)) {
      if (t->sender == p) return PP::leaf(PartySend{t->send_event(), t->channel});
      if (t->receiver == p) {
        return PP::leaf(PartyRecv{t->channel, t->receive_event()});
      }
      return PP::emp();
    }
    const GuardRendezvous& r = ctx.guards().at(ordinal++);
    if (!r.rendezvous) {
      if (r.guard.lhs.party == p) {
        return PP::leaf(PartyGuard{r.channel, r.guard.lhs});
      }
      return PP::emp();
    }
    if (r.guard.lhs.party == p) {
      return PP::seq(PP::leaf(PartyGuard{r.channel, r.guard.lhs}),
                     PP::leaf(PartySend{r.send_event(), r.channel}));
    }
    if (r.guard.rhs.party == p) {
      return PP::seq(PP::leaf(PartyRecv{r.channel, r.receive_event()}),
                     PP::leaf(PartyGuard{r.channel, r.guard.rhs}));
    }
    return PP::emp();
  });
  return normalize(out);
}

PerPartyProtocol project_party(const GlobalProtocol& g, const PartyId& p) {
  return project_party(g, p, ProjectionContext(g));
}

namespace {

const Channel& channel_of(const PartyLeaf& l) {
  return std::visit([](const auto& x) -> const Channel& { return x.channel; }, l);
}

}  // namespace

PerEndpointProtocol project_endpoint(const PerPartyProtocol& pi,
                                     const std::string& channel) {
  using PE = PerEndpointProtocol;
  PE out = pi.transform<EndpointLeaf>([&](const PartyLeaf& l) -> PE {
    if (channel_of(l).name != channel) return PE::emp();
    if (auto* s = std::get_if<PartySend>(&l)) {
      return PE::leaf(EndpointSend{s->event, nullptr});
    }
    if (auto* r = std::get_if<PartyRecv>(&l)) {
      return PE::leaf(EndpointRecv{r->event, nullptr});
    }
    return PE::leaf(EndpointGuard{std::get<PartyGuard>(l).event});
  });
  return normalize(out);
}

std::vector<Channel> endpoints_of(const PerPartyProtocol& pi) {
  std::vector<Channel> out;
  pi.for_each_leaf([&out](const PartyLeaf& l) {
    const Channel& c = channel_of(l);
    for (const auto& x : out) {
      if (x.name == c.name) return;
    }
    out.push_back(c);
  });
  return out;
}

std::map<std::string, PerEndpointProtocol> project_endpoints(
    const PerPartyProtocol& pi) {
  std::map<std::string, PerEndpointProtocol> out;
  for (const auto& c : endpoints_of(pi)) {
    out.emplace(c.name, project_endpoint(pi, c.name));
  }
  return out;
}

PartyResidue unproject(const std::map<std::string, PerEndpointProtocol>& residues,
                       const PartyId& p) {
  PartyResidue r{p, {}};
  for (const auto& [c, proto] : residues) {
    PerEndpointProtocol n = normalize(proto);
    if (!n.is_emp()) r.endpoints.emplace(c, n);
  }
  return r;
}

std::string PartyResidue::to_string() const {
  if (endpoints.empty()) return "emp";
  std::string out;
  for (const auto& [c, proto] : endpoints) {
    if (!out.empty()) out += " || ";
    out += c + ": " + render_endpoint(proto);
  }
  return out;
}

std::string render_projection(const PartyId& p, const PerPartyProtocol& pi) {
  return p.name + ": " + render_party(pi);
}

}  // namespace chanrace
