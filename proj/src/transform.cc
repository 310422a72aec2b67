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

#include "chanrace/transform.hh"

#include <algorithm>
#include <map>
#include <set>

namespace chanrace {

namespace {

std::string render_cycle(const std::vector<EventPoint>& cycle) {
  std::string s;
  for (const auto& p : cycle) s += p.to_string() + " -> ";
  return s + cycle.front().to_string();
}

}  // namespace

TransformReport make_race_free(const GlobalProtocol& g) {
  if (auto cyc = screen_deadlock(g)) {
    throw InputError("protocol has a happens-before cycle: " +
                     render_cycle(*cyc));
  }
  TransformReport rep;
  rep.input = g;

  auto ts = transmissions_of(g);
  std::set<std::pair<TransIndex, TransIndex>> ordered;
  for (const auto& [a, b] : seq_ordered_pairs(g)) {
    ordered.emplace(*a.index, *b.index);
  }
  auto before = [&](const Transmission& a, const Transmission& b) {
    return ordered.count({*a.index, *b.index}) > 0;
  };

  std::set<HbGuard> present;
  for (const auto& gd : guards_of(g)) present.insert(gd);

  std::map<TransIndex, std::vector<HbGuard>> pending;
  for (const auto& c : channels_of(g)) {
    std::vector<Transmission> on;
    for (const auto& t : ts) {
      if (t.channel.name == c.name) on.push_back(t);
    }
    for (std::size_t j = 0; j < on.size(); ++j) {
      for (std::size_t i = 0; i < on.size(); ++i) {
        if (i == j) continue;
        const auto& ti = on[i];
        const auto& tj = on[j];
        if (i < j && !before(ti, tj) && !before(tj, ti)) {
          rep.warnings.push_back(
              {"transmissions " + ti.index->to_string() + " and " +
               tj.index->to_string() + " on channel " + c.name +
               " are only concurrently composed; no guard is inserted"});
        }
        if (!before(ti, tj)) continue;
        // Only immediate predecessors: skip ti if some other pred follows it.
        bool immediate = true;
        for (std::size_t k = 0; k < on.size() && immediate; ++k) {
          if (k != i && k != j && before(ti, on[k]) && before(on[k], tj)) {
            immediate = false;
          }
        }
        if (!immediate) continue;
        for (const HbGuard& gd :
             {HbGuard{ti.send_event(), tj.send_event()},
              HbGuard{ti.receive_event(), tj.receive_event()}}) {
          if (!present.insert(gd).second) continue;
          pending[*tj.index].push_back(gd);
          rep.inserted_guards.push_back({gd, c.name, *ti.index, *tj.index});
        }
      }
    }
  }

  rep.output = g.map_leaves([&pending](const GlobalLeaf& l) {
    auto* t = std::get_if<Transmission>(&l);
    if (!t) return GlobalProtocol::leaf(l);
    auto it = pending.find(*t->index);
    if (it == pending.end()) return GlobalProtocol::leaf(l);
    std::vector<GlobalProtocol> parts;
    for (const auto& gd : it->second) parts.push_back(GlobalProtocol::leaf(gd));
    parts.push_back(GlobalProtocol::leaf(l));
    return GlobalProtocol::seq_of(parts);
  });
  // Splicing guards in nests Seq nodes; flatten back to canonical form.
  rep.output = normalize(rep.output);
  return rep;
}

std::optional<std::vector<EventPoint>> screen_deadlock(const GlobalProtocol& g) {
  return detect_cycle(derive_orders(g).hb);
}

std::string TransformReport::to_text() const {
  std::string out;
  for (const auto& ig : inserted_guards) {
    out += "# guard " + ig.guard.to_string() + " on " + ig.channel +
           " between transmissions " + ig.after.to_string() + " and " +
           ig.before.to_string() + "\n";
  }
  for (const auto& w : warnings) out += "# warning: " + w.message + "\n";
  return out + render_protocol(output) + "\n";
}

}  // namespace chanrace
