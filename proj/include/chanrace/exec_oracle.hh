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

#ifndef CHANRACE_EXEC_ORACLE_HH_
#define CHANRACE_EXEC_ORACLE_HH_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chanrace/event_order.hh"
#include "chanrace/program.hh"
#include "chanrace/protocol.hh"
#include "chanrace/verifier.hh"

namespace chanrace {

struct ExecEvent {
  EventRef event;
  EventKind kind;
  std::string channel;

  // Party.index.{S|R}@channel
  std::string to_string() const;
  bool operator==(const ExecEvent&) const = default;
};

struct SequentialExecution {
  std::vector<ExecEvent> order;
  Matching matching;
  // Events that never executed because the run got stuck.
  std::vector<ExecEvent> blocked;

  bool complete() const { return blocked.empty(); }
  // Events one per line, then `recv <- send` lines, then blocked events.
  std::string dump() const;
  bool operator==(const SequentialExecution&) const = default;
};

// Per-channel FIFO matching induced by an order.
Matching fifo_matching(const std::vector<ExecEvent>& order);
SequentialExecution parse_trace(std::string_view text);

/**
 * What gets executed: atomic events, the events each one must wait for
 * (program order and guards), concrete capacities, and the expected
 * communication used for race classification.
 */
struct ExecModel {
  std::vector<ExecEvent> events;
  std::vector<std::vector<int>> preds;
  CapacityMap capacities;
  CbOrder cb;
};

ExecModel model_of(const GlobalProtocol& g, unsigned any_capacity = 1);
// Events of a program; named after the bound protocol's events when given.
ExecModel model_of(const Program& prog, const GlobalProtocol* bound = nullptr,
                   const Bindings& bindings = {});

/**
 * All maximal executions (complete or stuck). Unbuffered channels execute a
 * send and its receive as one adjacent pair. Throws std::length_error if the
 * model has more than `bound` events. Sorted by dump().
 */
std::vector<SequentialExecution> enumerate_executions(const ExecModel& m,
                                                      std::size_t bound = 10);

struct LegalityVerdict {
  bool legal = true;
  std::optional<std::vector<EventPoint>> cycle;
  std::string reason;
};

LegalityVerdict check_legal(const SequentialExecution& e,
                            const CapacityMap& capacities);

struct RaceViolation {
  EventRef receive;
  EventRef expected_send;
  std::optional<EventRef> actual_send;  // none: received nothing
  std::string channel;

  std::string to_string() const;
  bool operator==(const RaceViolation&) const = default;
};

struct RaceVerdict {
  bool race_free = true;
  std::optional<RaceViolation> witness;
  std::vector<RaceViolation> violations;
};

RaceVerdict classify_race(const SequentialExecution& e, const CbOrder& cb);
RaceVerdict classify_race(const SequentialExecution& e, const GlobalProtocol& g);

struct RaceSearch {
  std::uint64_t executions = 0;
  std::uint64_t racy = 0;
  std::optional<SequentialExecution> witness;
};

// Counts maximal executions and racy ones with memoised state search.
RaceSearch find_races(const ExecModel& m);

struct CountVector {
  // counts[i] is the number of protocols with i + 2 parties.
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const;
  std::string to_string() const;
};

std::pair<std::uint64_t, CountVector> count_protocols(int n);
std::uint64_t brute_force_count(int n);

struct HbCbAnalysis {
  std::map<std::string, std::vector<EventRef>> send_order;
  std::map<std::string, std::vector<EventRef>> recv_order;
  std::map<std::string, bool> isotone;
  bool analysis_race_free = false;
  bool oracle_racy = false;
  std::optional<SequentialExecution> witness;
  bool discrepancy = false;

  std::string to_string() const;
};

// Runs the HB-CB based isotone argument against the oracle.
HbCbAnalysis analyze_hb_cb(const GlobalProtocol& g, unsigned any_capacity = 1);

struct CanonicalImplementation {
  Program program;
  Bindings bindings;
  std::string source;
};

CanonicalImplementation canonical_implementation(const GlobalProtocol& g,
                                                 unsigned any_capacity = 1);

}  // namespace chanrace

#endif  // CHANRACE_EXEC_ORACLE_HH_
