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

#ifndef CHANRACE_PROGRAM_HH_
#define CHANRACE_PROGRAM_HH_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chanrace/protocol.hh"

namespace chanrace {

struct SourceLoc {
  int line = 0;
  int column = 0;
  bool operator==(const SourceLoc&) const = default;
};

struct ChannelDecl {
  std::string name;
  unsigned capacity = 0;
  SourceLoc loc;
};

struct SendStmt {
  std::string channel;
  std::string payload;
  bool payload_is_channel = false;  // delegation
};

struct RecvStmt {
  std::string channel;
  std::optional<std::string> bind;
};

struct CallStmt {
  std::string callee;
};

struct SpawnStmt {
  std::string callee;
};

struct Stmt {
  std::variant<SendStmt, RecvStmt, CallStmt, SpawnStmt> op;
  SourceLoc loc;

  bool is_send() const { return std::holds_alternative<SendStmt>(op); }
  bool is_recv() const { return std::holds_alternative<RecvStmt>(op); }
  bool is_channel_op() const { return is_send() || is_recv(); }
  // Channel of a send or receive; empty otherwise.
  std::string channel() const;
  // Source form, e.g. `e <- 0`, `x := <-c`, `go A()`.
  std::string to_string() const;
};

struct Function {
  std::string name;
  std::vector<Stmt> body;
  SourceLoc loc;
};

struct Program {
  std::string file;  // for diagnostics only
  std::vector<ChannelDecl> channels;
  std::map<std::string, Function> functions;

  const ChannelDecl* channel(const std::string& name) const;
  const Function& entry() const;
  // `file:line`
  std::string where(const SourceLoc& loc) const;
};

struct PartyTrace {
  PartyId party;
  std::vector<Stmt> steps;  // channel operations only, in program order
};

// Parses the restricted Go subset. Throws InputError with a location.
Program parse_program(std::string_view text, std::string file = "");

/**
 * Functions spawned from main (directly, through calls, or through spawner
 * functions without channel operations) that perform at least one send or
 * receive. Calls are inlined. Sorted by name.
 */
std::vector<PartyTrace> extract_parties(const Program& prog);

}  // namespace chanrace

#endif  // CHANRACE_PROGRAM_HH_
