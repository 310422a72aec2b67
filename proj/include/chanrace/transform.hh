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

#ifndef CHANRACE_TRANSFORM_HH_
#define CHANRACE_TRANSFORM_HH_

#include <optional>
#include <string>
#include <vector>

#include "chanrace/event_order.hh"
#include "chanrace/protocol.hh"

namespace chanrace {

struct InsertedGuard {
  HbGuard guard;
  std::string channel;
  TransIndex after;   // earlier transmission of the pair
  TransIndex before;  // the guard sits immediately before this one

  bool operator==(const InsertedGuard&) const = default;
};

struct TransformReport {
  GlobalProtocol input;
  GlobalProtocol output;
  std::vector<InsertedGuard> inserted_guards;
  // Same-channel transmissions related only by concurrent composition.
  std::vector<Diagnostic> warnings;

  // Comment lines describing the guards and warnings, then the protocol.
  std::string to_text() const;
};

/**
 * Inserts G(send_i HB send_j) ; G(recv_i HB recv_j) immediately before t_j
 * for every pair of same-channel transmissions where t_i is an immediate
 * sequential predecessor of t_j. Guards already present are not repeated.
 * The output is normalized.
 * Throws InputError if the input's HB order has a cycle.
 */
TransformReport make_race_free(const GlobalProtocol& g);

std::optional<std::vector<EventPoint>> screen_deadlock(const GlobalProtocol& g);

}  // namespace chanrace

#endif  // CHANRACE_TRANSFORM_HH_
