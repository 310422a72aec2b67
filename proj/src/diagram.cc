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

#include "chanrace/diagram.hh"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "chanrace/event_order.hh"

namespace chanrace {

Dialect parse_dialect(std::string_view name) {
  if (name == "dot") return Dialect::kDot;
  if (name == "mermaid") return Dialect::kMermaid;
  throw InputError("unknown diagram format '" + std::string(name) +
                   "' (expected dot or mermaid)");
}

namespace {

struct Node {
  std::string id;     // event text, e.g. A.1
  std::string party;
  std::string label;
  bool blocked = false;
};

struct Edge {
  std::string from, to;
  bool dotted = false;
  std::string label;
};

std::string mermaid_id(const std::string& s) {
  std::string out = "n_";
  for (char c : s) out += (c == '.' ? '_' : c);
  return out;
}

std::string emit(const std::string& name, const std::vector<std::string>& lifelines,
                 const std::vector<Node>& nodes, const std::vector<Edge>& edges,
                 Dialect d) {
  std::ostringstream os;
  if (d == Dialect::kDot) {
    os << "digraph " << name << " {\n  rankdir=TB;\n  node [shape=box];\n";
    for (std::size_t i = 0; i < lifelines.size(); ++i) {
      os << "  subgraph cluster_" << i << " {\n    label=\"" << lifelines[i] << "\";\n";
      for (const auto& n : nodes) {
        if (n.party != lifelines[i]) continue;
        os << "    \"" << n.id << "\" [label=\"" << n.label << "\""
           << (n.blocked ? ", style=dashed" : "") << "];\n";
      }
      os << "  }\n";
    }
    for (const auto& e : edges) {
      os << "  \"" << e.from << "\" -> \"" << e.to << "\"";
      if (e.dotted) os << " [style=dotted, label=\"" << e.label << "\"]";
      os << ";\n";
    }
    os << "}\n";
  } else {
    os << "flowchart TB\n";
    for (const auto& p : lifelines) {
      os << "  subgraph " << p << "\n";
      for (const auto& n : nodes) {
        if (n.party != p) continue;
        os << "    " << mermaid_id(n.id) << "[\"" << n.label << "\"]\n";
      }
      os << "  end\n";
    }
    for (const auto& e : edges) {
      os << "  " << mermaid_id(e.from)
         << (e.dotted ? " -.->|" + e.label + "| " : " --> ") << mermaid_id(e.to)
         << "\n";
    }
    for (const auto& n : nodes) {
      if (n.blocked) os << "  style " << mermaid_id(n.id) << " stroke-dasharray: 5 5\n";
    }
  }
  return os.str();
}

std::string event_label(const EventRef& e, EventKind k, const std::string& ch) {
  return e.to_string() + (k == EventKind::kSend ? " !" : " ?") + ch;
}

}  // namespace

std::string render_protocol_diagram(const GlobalProtocol& g, Dialect d) {
  Orders o = derive_orders(g);
  std::vector<std::string> lifelines;
  auto note = [&](const std::string& p) {
    if (std::find(lifelines.begin(), lifelines.end(), p) == lifelines.end()) {
      lifelines.push_back(p);
    }
  };
  for (const auto& t : transmissions_of(g)) {
    note(t.sender.name);
    note(t.receiver.name);
  }

  auto evs = events_of(g);
  // Kahn's algorithm over event-level HB, ties broken by event order.
  std::vector<ProtocolEvent> order;
  std::vector<char> placed(evs.size(), 0);
  while (order.size() < evs.size()) {
    for (std::size_t i = 0; i < evs.size(); ++i) {
      if (placed[i]) continue;
      bool ready = true;
      for (std::size_t j = 0; j < evs.size() && ready; ++j) {
        if (!placed[j] && j != i &&
            event_happens_before(o.hb, evs[j].event, evs[i].event)) {
          ready = false;
        }
      }
      if (ready) {
        placed[i] = 1;
        order.push_back(evs[i]);
        break;
      }
      if (i + 1 == evs.size()) {
        // Cyclic HB: place the remaining events in index order.
        for (std::size_t k = 0; k < evs.size(); ++k) {
          if (!placed[k]) {
            placed[k] = 1;
            order.push_back(evs[k]);
          }
        }
      }
    }
  }

  std::vector<Node> nodes;
  for (const auto& e : order) {
    nodes.push_back({e.event.to_string(), e.event.party.name,
                     event_label(e.event, e.kind, e.channel.name)});
  }
  std::vector<Edge> edges;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : o.hb.edges()) {
    if (e.label == EdgeLabel::kInternal || e.from.event == e.to.event) continue;
    auto key = std::make_pair(e.from.event.to_string(), e.to.event.to_string());
    if (seen.insert(key).second) edges.push_back({key.first, key.second, false, ""});
  }
  for (const auto& t : o.cb.triples()) {
    edges.push_back({t.send.to_string(), t.receive.to_string(), true, t.channel.name});
  }
  return emit("protocol", lifelines, nodes, edges, d);
}

std::string render_trace_diagram(const SequentialExecution& e, Dialect d) {
  std::vector<std::string> lifelines;
  std::vector<Node> nodes;
  auto add = [&](const ExecEvent& x, bool blocked) {
    const std::string& p = x.event.party.name;
    if (std::find(lifelines.begin(), lifelines.end(), p) == lifelines.end()) {
      lifelines.push_back(p);
    }
    nodes.push_back({x.event.to_string(), p, event_label(x.event, x.kind, x.channel),
                     blocked});
  };
  for (const auto& x : e.order) add(x, false);
  for (const auto& x : e.blocked) add(x, true);

  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < e.order.size(); ++i) {
    edges.push_back({e.order[i].event.to_string(), e.order[i + 1].event.to_string(),
                     false, ""});
  }
  for (const auto& [c, q] : e.matching.per_channel) {
    for (const auto& p : q.pairs()) {
      edges.push_back({p.send.to_string(), p.receive.to_string(), true, c});
    }
  }
  return emit("trace", lifelines, nodes, edges, d);
}

}  // namespace chanrace
