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

#ifndef CHANRACE_DIAGRAM_HH_
#define CHANRACE_DIAGRAM_HH_

#include <string>
#include <string_view>

#include "chanrace/exec_oracle.hh"
#include "chanrace/protocol.hh"

namespace chanrace {

enum class Dialect { kDot, kMermaid };

// Throws InputError for anything but "dot" or "mermaid".
Dialect parse_dialect(std::string_view name);

/**
 * Sequence-diagram style rendering: one lifeline per party in order of first
 * appearance, events in a topological order of HB, solid HB edges and dotted
 * CB edges labelled with the channel.
 */
std::string render_protocol_diagram(const GlobalProtocol& g, Dialect d);

// Solid edges between consecutive events, dotted labelled matching edges.
// Blocked events are drawn dashed after the executed ones.
std::string render_trace_diagram(const SequentialExecution& e, Dialect d);

}  // namespace chanrace

#endif  // CHANRACE_DIAGRAM_HH_
