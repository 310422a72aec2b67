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

#include "chanrace/program.hh"

#include <algorithm>
#include <cctype>
#include <set>

namespace chanrace {

std::string Stmt::channel() const {
  if (auto* s = std::get_if<SendStmt>(&op)) return s->channel;
  if (auto* r = std::get_if<RecvStmt>(&op)) return r->channel;
  return "";
}

std::string Stmt::to_string() const {
  if (auto* s = std::get_if<SendStmt>(&op)) return s->channel + " <- " + s->payload;
  if (auto* r = std::get_if<RecvStmt>(&op)) {
    return (r->bind ? *r->bind + " := " : std::string()) + "<-" + r->channel;
  }
  if (auto* c = std::get_if<CallStmt>(&op)) return c->callee + "()";
  return "go " + std::get<SpawnStmt>(op).callee + "()";
}

const ChannelDecl* Program::channel(const std::string& name) const {
  for (const auto& c : channels) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Function& Program::entry() const {
  auto it = functions.find("main");
  if (it == functions.end()) throw InputError("program has no func main");
  return it->second;
}

std::string Program::where(const SourceLoc& loc) const {
  return (file.empty() ? std::string("<input>") : file) + ":" +
         std::to_string(loc.line);
}

namespace {

enum class Tok { kIdent, kInt, kString, kPunct, kNewline, kEnd };

struct Token {
  Tok kind;
  std::string text;
  SourceLoc loc;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    SourceLoc at{line, col};
    if (c == '\n') {
      out.push_back({Tok::kNewline, "\\n", at});
      advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      auto end = src.find("*/", i + 2);
      if (end == std::string_view::npos) {
        throw InputError("unterminated block comment", at.line, at.column);
      }
      // A block comment spanning lines still terminates a statement.
      bool multiline = src.substr(i, end - i).find('\n') != std::string_view::npos;
      advance(end + 2 - i);
      if (multiline) out.push_back({Tok::kNewline, "\\n", at});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::kIdent, std::string(src.substr(i, j - i)), at});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::kInt, std::string(src.substr(i, j - i)), at});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') {
        if (src[j] == '\\') ++j;
        ++j;
      }
      if (j >= src.size() || src[j] != '"') {
        throw InputError("unterminated string literal", at.line, at.column);
      }
      out.push_back({Tok::kString, std::string(src.substr(i, j + 1 - i)), at});
      advance(j + 1 - i);
      continue;
    }
    for (const char* p : {"<-", ":="}) {
      if (src.substr(i, 2) == p) {
        out.push_back({Tok::kPunct, p, at});
        advance(2);
        goto next;
      }
    }
    if (std::string_view("(){}[],;=.").find(c) != std::string_view::npos) {
      out.push_back({Tok::kPunct, std::string(1, c), at});
      advance(1);
      continue;
    }
    throw InputError(std::string("unexpected character '") + c + "'", at.line,
                     at.column);
  next:;
  }
  out.push_back({Tok::kEnd, "<end of input>", {line, col}});
  return out;
}

const std::set<std::string> kUnsupported = {
    "for", "if", "else", "select", "defer", "switch", "case", "goto",
    "return", "break", "continue", "range", "fallthrough"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program parse() {
    Program prog;
    skip_newlines();
    if (is_ident("package")) {
      take();
      expect_kind(Tok::kIdent, "package name");
      end_of_statement();
      skip_newlines();
    }
    while (peek().kind != Tok::kEnd) {
      if (is_ident("import")) {
        import_decl();
      } else if (is_ident("var")) {
        prog.channels.push_back(var_decl(prog));
      } else if (is_ident("func")) {
        Function f = func_decl();
        if (prog.functions.count(f.name)) {
          throw InputError("function '" + f.name + "' redeclared", f.loc.line,
                           f.loc.column);
        }
        prog.functions.emplace(f.name, std::move(f));
      } else {
        fail("expected 'var', 'func' or 'import'");
      }
      skip_newlines();
    }
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token take() { return toks_[pos_++]; }
  bool is_ident(const char* s) const {
    return peek().kind == Tok::kIdent && peek().text == s;
  }
  bool is_punct(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::kPunct && peek(ahead).text == s;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw InputError(what + ", found '" + t.text + "'", t.loc.line, t.loc.column);
  }

  Token expect_kind(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return take();
  }

  Token expect_punct(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'");
    return take();
  }

  void skip_newlines() {
    while (peek().kind == Tok::kNewline || is_punct(";")) take();
  }

  void end_of_statement() {
    if (peek().kind == Tok::kNewline || is_punct(";")) {
      take();
      return;
    }
    if (peek().kind == Tok::kEnd || is_punct("}")) return;
    fail("expected end of statement");
  }

  void import_decl() {
    take();
    if (is_punct("(")) {
      take();
      skip_newlines();
      while (peek().kind == Tok::kString) {
        take();
        skip_newlines();
      }
      expect_punct(")");
    } else {
      expect_kind(Tok::kString, "import path");
    }
    end_of_statement();
  }

  ChannelDecl var_decl(const Program& prog) {
    take();
    Token name = expect_kind(Tok::kIdent, "variable name");
    if (prog.channel(name.text)) {
      throw InputError("channel '" + name.text + "' redeclared", name.loc.line,
                       name.loc.column);
    }
    expect_punct("=");
    if (!is_ident("make")) fail("expected make(chan T, k)");
    take();
    expect_punct("(");
    if (!is_ident("chan")) fail("expected 'chan'");
    // Element type: anything up to the top-level ',' or ')'.
    int depth = 0;
    while (depth > 0 || !(is_punct(",") || is_punct(")"))) {
      if (peek().kind == Tok::kEnd || peek().kind == Tok::kNewline) {
        fail("unterminated channel type");
      }
      if (is_punct("(") || is_punct("{") || is_punct("[")) ++depth;
      if (is_punct(")") || is_punct("}") || is_punct("]")) --depth;
      take();
    }
    unsigned cap = 0;
    if (is_punct(",")) {
      take();
      cap = static_cast<unsigned>(std::stoul(expect_kind(Tok::kInt, "capacity").text));
    }
    expect_punct(")");
    end_of_statement();
    return ChannelDecl{name.text, cap, name.loc};
  }

  Function func_decl() {
    take();
    Token name = expect_kind(Tok::kIdent, "function name");
    expect_punct("(");
    expect_punct(")");
    expect_punct("{");
    Function f{name.text, {}, name.loc};
    skip_newlines();
    while (!is_punct("}")) {
      if (peek().kind == Tok::kEnd) fail("expected '}'");
      f.body.push_back(statement());
      end_of_statement();
      skip_newlines();
    }
    take();
    end_of_statement();
    return f;
  }

  Stmt statement() {
    const Token& t = peek();
    SourceLoc at = t.loc;
    if (t.kind == Tok::kIdent && kUnsupported.count(t.text)) {
      throw InputError("unsupported construct '" + t.text + "'", at.line,
                       at.column);
    }
    if (t.kind == Tok::kIdent && t.text == "go") {
      take();
      Token callee = expect_kind(Tok::kIdent, "function name after 'go'");
      expect_punct("(");
      expect_punct(")");
      return Stmt{SpawnStmt{callee.text}, at};
    }
    if (is_punct("<-")) {
      take();
      Token ch = expect_kind(Tok::kIdent, "channel name");
      return Stmt{RecvStmt{ch.text, std::nullopt}, at};
    }
    if (t.kind == Tok::kIdent) {
      if (is_punct("(", 1)) {
        Token callee = take();
        take();
        expect_punct(")");
        return Stmt{CallStmt{callee.text}, at};
      }
      if (is_punct("<-", 1)) {
        Token ch = take();
        take();
        const Token& v = peek();
        if (v.kind != Tok::kIdent && v.kind != Tok::kInt && v.kind != Tok::kString) {
          fail("expected value to send");
        }
        Token val = take();
        return Stmt{SendStmt{ch.text, val.text, false}, at};
      }
      if ((is_punct(":=", 1) || is_punct("=", 1)) && is_punct("<-", 2)) {
        Token var = take();
        take();
        take();
        Token ch = expect_kind(Tok::kIdent, "channel name");
        return Stmt{RecvStmt{ch.text, var.text}, at};
      }
    }
    fail("unsupported statement");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void check_program(Program& prog) {
  for (auto& [name, f] : prog.functions) {
    bool spawns = false, ops = false;
    for (auto& s : f.body) {
      spawns = spawns || std::holds_alternative<SpawnStmt>(s.op);
      ops = ops || s.is_channel_op();
      if (!s.is_channel_op()) continue;
      if (!prog.channel(s.channel())) {
        throw InputError("use of undeclared channel '" + s.channel() + "'",
                         s.loc.line, s.loc.column);
      }
      if (auto* snd = std::get_if<SendStmt>(&s.op)) {
        snd->payload_is_channel = prog.channel(snd->payload) != nullptr;
      }
    }
    if (name == "main" && ops) {
      throw InputError("main is never a party: it may not send or receive",
                       f.loc.line, f.loc.column);
    }
    if (name != "main" && spawns && ops) {
      throw InputError("party '" + name + "' may not spawn", f.loc.line,
                       f.loc.column);
    }
  }
}

struct Extractor {
  const Program& prog;
  std::set<std::string> spawned;
  std::vector<PartyTrace> parties;

  const Function& lookup(const std::string& name, const SourceLoc& at) const {
    auto it = prog.functions.find(name);
    if (it == prog.functions.end()) {
      throw InputError("call of undefined function '" + name + "'", at.line,
                       at.column);
    }
    return it->second;
  }

  // Inlines calls; keeps spawns and channel operations.
  void inline_body(const Function& f, std::vector<std::string>& stack,
                   std::vector<Stmt>& out) {
    stack.push_back(f.name);
    for (const auto& s : f.body) {
      if (auto* c = std::get_if<CallStmt>(&s.op)) {
        if (std::find(stack.begin(), stack.end(), c->callee) != stack.end()) {
          throw InputError("recursive call of '" + c->callee + "'", s.loc.line,
                           s.loc.column);
        }
        inline_body(lookup(c->callee, s.loc), stack, out);
      } else {
        if (auto* sp = std::get_if<SpawnStmt>(&s.op)) lookup(sp->callee, s.loc);
        out.push_back(s);
      }
    }
    stack.pop_back();
  }

  void spawn(const std::string& name, const SourceLoc& at) {
    if (!spawned.insert(name).second) {
      throw InputError("function '" + name + "' spawned more than once",
                       at.line, at.column);
    }
    std::vector<std::string> stack;
    std::vector<Stmt> steps;
    inline_body(lookup(name, at), stack, steps);
    bool ops = std::any_of(steps.begin(), steps.end(),
                           [](const Stmt& s) { return s.is_channel_op(); });
    std::vector<Stmt> spawns;
    for (const auto& s : steps) {
      if (std::holds_alternative<SpawnStmt>(s.op)) spawns.push_back(s);
    }
    if (ops && !spawns.empty()) {
      throw InputError("party '" + name + "' may not spawn", spawns[0].loc.line,
                       spawns[0].loc.column);
    }
    // A function that neither spawns nor communicates is an idle party.
    if (ops || spawns.empty()) {
      parties.push_back(PartyTrace{PartyId{name}, steps});
      return;
    }
    for (const auto& s : spawns) spawn(std::get<SpawnStmt>(s.op).callee, s.loc);
  }
};

}  // namespace

Program parse_program(std::string_view text, std::string file) {
  try {
    Program prog = Parser(lex(text)).parse();
    prog.file = file;
    check_program(prog);
    return prog;
  } catch (const InputError& e) {
    if (file.empty()) throw;
    throw InputError(file + ":" + e.what());
  }
}

std::vector<PartyTrace> extract_parties(const Program& prog) {
  Extractor ex{prog, {}, {}};
  const Function& main = prog.entry();
  std::vector<std::string> stack;
  std::vector<Stmt> body;
  ex.inline_body(main, stack, body);
  for (const auto& s : body) {
    if (s.is_channel_op()) {
      throw InputError("main is never a party: '" + s.to_string() +
                           "' reached from main",
                       s.loc.line, s.loc.column);
    }
    ex.spawn(std::get<SpawnStmt>(s.op).callee, s.loc);
  }
  std::sort(ex.parties.begin(), ex.parties.end(),
            [](const PartyTrace& a, const PartyTrace& b) {
              return a.party < b.party;
            });
  return ex.parties;
}

}  // namespace chanrace
