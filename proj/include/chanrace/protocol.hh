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

#ifndef CHANRACE_PROTOCOL_HH_
#define CHANRACE_PROTOCOL_HH_

#include <compare>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chanrace/protocol_tree.hh"

namespace chanrace {

/**
 * Malformed input: bad syntax, unresolved references, inconsistent
 * declarations. Line and column are 1-based; 0 means unknown.
 */
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg, int line = 0, int column = 0)
      : std::runtime_error(format(msg, line, column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& msg, int line, int column) {
    if (line == 0) return msg;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + msg;
  }

  int line_;
  int column_;
};

class Capacity {
 public:
  static Capacity exact(unsigned k) { return Capacity(k); }
  static Capacity any() { return Capacity(); }

  bool is_any() const { return !k_.has_value(); }
  unsigned value() const;
  std::string to_string() const;

  bool operator==(const Capacity&) const = default;

 private:
  Capacity() = default;
  explicit Capacity(unsigned k) : k_(k) {}
  std::optional<unsigned> k_;
};

struct Channel {
  std::string name;
  Capacity capacity = Capacity::any();

  bool operator==(const Channel&) const = default;
};

struct PartyId {
  std::string name;

  auto operator<=>(const PartyId&) const = default;
};

struct TransIndex {
  std::vector<int> path;

  static TransIndex of(int i) { return TransIndex{{i}}; }
  std::string to_string() const;
  bool inserted() const { return path.size() > 1; }

  auto operator<=>(const TransIndex&) const = default;
};

struct EventRef {
  PartyId party;
  TransIndex index;

  std::string to_string() const;
  static EventRef parse(std::string_view text);

  auto operator<=>(const EventRef&) const = default;
};

enum class EventKind { kSend, kReceive };

// ---------------------------------------------------------------- global

struct Transmission {
  PartyId sender;
  Channel channel;
  std::optional<TransIndex> index;
  PartyId receiver;

  EventRef send_event() const;
  EventRef receive_event() const;

  bool operator==(const Transmission&) const = default;
};

// G(lhs HB rhs)
struct HbGuard {
  EventRef lhs;
  EventRef rhs;

  std::string to_string() const;

  bool operator==(const HbGuard&) const = default;
  auto operator<=>(const HbGuard&) const = default;
};

using GlobalLeaf = std::variant<Transmission, HbGuard>;
using GlobalProtocol = ProtocolTree<GlobalLeaf>;

// --------------------------------------------------------------- per-party

struct PartySend {
  EventRef event;
  Channel channel;
  bool operator==(const PartySend&) const = default;
};

struct PartyRecv {
  Channel channel;
  EventRef event;
  bool operator==(const PartyRecv&) const = default;
};

struct PartyGuard {
  Channel channel;
  EventRef event;
  bool operator==(const PartyGuard&) const = default;
};

using PartyLeaf = std::variant<PartySend, PartyRecv, PartyGuard>;
using PerPartyProtocol = ProtocolTree<PartyLeaf>;

// ------------------------------------------------------------ per-endpoint

struct DelegatedEndpoint;

struct EndpointSend {
  EventRef event;
  std::shared_ptr<const DelegatedEndpoint> payload;
  bool operator==(const EndpointSend& o) const;
};

struct EndpointRecv {
  EventRef event;
  std::shared_ptr<const DelegatedEndpoint> payload;
  bool operator==(const EndpointRecv& o) const;
};

struct EndpointGuard {
  EventRef event;
  bool operator==(const EndpointGuard&) const = default;
};

using EndpointLeaf = std::variant<EndpointSend, EndpointRecv, EndpointGuard>;
using PerEndpointProtocol = ProtocolTree<EndpointLeaf>;

struct DelegatedEndpoint {
  Channel channel;
  PerEndpointProtocol protocol;
  bool operator==(const DelegatedEndpoint&) const = default;
};

// --------------------------------------------------------------- operations

struct ProtocolEvent {
  EventRef event;
  EventKind kind;
  Channel channel;

  auto operator<=>(const ProtocolEvent& o) const { return event <=> o.event; }
  bool operator==(const ProtocolEvent& o) const {
    return event == o.event && kind == o.kind && channel == o.channel;
  }
};

struct Diagnostic {
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

GlobalProtocol parse_protocol(std::string_view text);

// Expression only, no channel headers.
std::string render_expr(const GlobalProtocol& g);
// Channel headers for exact capacities followed by the expression.
std::string render_protocol(const GlobalProtocol& g);
std::string render_party(const PerPartyProtocol& p);
std::string render_endpoint(const PerEndpointProtocol& p);

std::string render_leaf(const GlobalLeaf& l);
std::string render_leaf(const PartyLeaf& l);
std::string render_leaf(const EndpointLeaf& l);

GlobalProtocol index_transmissions(const GlobalProtocol& g);

GlobalProtocol normalize(const GlobalProtocol& g);
PerPartyProtocol normalize(const PerPartyProtocol& p);
PerEndpointProtocol normalize(const PerEndpointProtocol& p);

std::vector<Diagnostic> validate(const GlobalProtocol& g);

// Sorted by event.
std::vector<ProtocolEvent> events_of(const GlobalProtocol& g);

std::vector<Transmission> transmissions_of(const GlobalProtocol& g);
std::vector<HbGuard> guards_of(const GlobalProtocol& g);
// First-appearance order.
std::vector<PartyId> parties_of(const GlobalProtocol& g);
std::vector<Channel> channels_of(const GlobalProtocol& g);

// parse_protocol followed by index_transmissions; rejects invalid protocols.
GlobalProtocol load_protocol(std::string_view text);

}  // namespace chanrace

#endif  // CHANRACE_PROTOCOL_HH_
