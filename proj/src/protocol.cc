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

#include "chanrace/protocol.hh"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

namespace chanrace {

unsigned Capacity::value() const {
  if (!k_) throw std::logic_error("capacity 'any' has no value");
  return *k_;
}

std::string Capacity::to_string() const {
  return k_ ? std::to_string(*k_) : "any";
}

std::string TransIndex::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(path[i]);
  }
  return s.empty() ? "?" : s;
}

std::string EventRef::to_string() const {
  return party.name + "." + index.to_string();
}

EventRef EventRef::parse(std::string_view text) {
  auto dot = text.find('.');
  if (dot == std::string_view::npos || dot == 0) {
    throw InputError("malformed event reference '" + std::string(text) + "'");
  }
  EventRef e{PartyId{std::string(text.substr(0, dot))}, {}};
  std::string_view rest = text.substr(dot + 1);
  while (!rest.empty()) {
    auto next = rest.find('.');
    std::string part(rest.substr(0, next));
    if (part.empty() ||
        part.find_first_not_of("0123456789") != std::string::npos) {
      throw InputError("malformed event reference '" + std::string(text) + "'");
    }
    e.index.path.push_back(std::stoi(part));
    if (next == std::string_view::npos) break;
    rest = rest.substr(next + 1);
  }
  if (e.index.path.empty()) {
    throw InputError("malformed event reference '" + std::string(text) + "'");
  }
  return e;
}

EventRef Transmission::send_event() const {
  return EventRef{sender, index.value_or(TransIndex{})};
}

EventRef Transmission::receive_event() const {
  return EventRef{receiver, index.value_or(TransIndex{})};
}

std::string HbGuard::to_string() const {
  return "[" + lhs.to_string() + " < " + rhs.to_string() + "]";
}

bool EndpointSend::operator==(const EndpointSend& o) const {
  if (!(event == o.event)) return false;
  if (!payload || !o.payload) return payload == o.payload;
  return *payload == *o.payload;
}

bool EndpointRecv::operator==(const EndpointRecv& o) const {
  if (!(event == o.event)) return false;
  if (!payload || !o.payload) return payload == o.payload;
  return *payload == *o.payload;
}

// ------------------------------------------------------------------ lexer

namespace {

enum class Tok {
  kIdent, kInt, kArrow, kDash, kColon, kSemi, kPar, kLParen, kRParen,
  kLBrack, kRBrack, kLess, kDot, kEnd
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
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
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::kEnd, "", line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.kind = Tok::kIdent;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::kInt;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      t.kind = Tok::kArrow;
      t.text = "->";
      advance(2);
    } else if (c == '|' && i + 1 < src.size() && src[i + 1] == '|') {
      t.kind = Tok::kPar;
      t.text = "||";
      advance(2);
    } else {
      switch (c) {
        case '-': t.kind = Tok::kDash; break;
        case ':': t.kind = Tok::kColon; break;
        case ';': t.kind = Tok::kSemi; break;
        case '(': t.kind = Tok::kLParen; break;
        case ')': t.kind = Tok::kRParen; break;
        case '[': t.kind = Tok::kLBrack; break;
        case ']': t.kind = Tok::kRBrack; break;
        case '<': t.kind = Tok::kLess; break;
        case '.': t.kind = Tok::kDot; break;
        default:
          throw InputError(std::string("unexpected character '") + c + "'",
                           line, col);
      }
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::kEnd, "<end of input>", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  GlobalProtocol parse() {
    while (peek().kind == Tok::kIdent && peek().text == "chan") header();
    GlobalProtocol g;
    if (peek().kind == Tok::kEnd) {
      g = GlobalProtocol::emp();
    } else {
      g = expr();
    }
    if (peek().kind != Tok::kEnd) fail("expected end of input");
    return resolve_capacities(g);
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw InputError(what + ", found '" + t.text + "'", t.line, t.column);
  }

  Token expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return take();
  }

  Capacity capacity_literal() {
    if (peek().kind == Tok::kInt) return Capacity::exact(std::stoul(take().text));
    if (peek().kind == Tok::kIdent && peek().text == "any") {
      take();
      return Capacity::any();
    }
    fail("expected capacity (integer or 'any')");
  }

  void declare(const std::string& name, Capacity cap, const Token& at) {
    auto it = declared_.find(name);
    if (it != declared_.end() && !(it->second == cap)) {
      throw InputError("conflicting capacities for channel '" + name + "': " +
                           it->second.to_string() + " and " + cap.to_string(),
                       at.line, at.column);
    }
    declared_.emplace(name, cap);
  }

  void header() {
    take();
    Token name = expect(Tok::kIdent, "channel name");
    Token kw = expect(Tok::kIdent, "'cap'");
    if (kw.text != "cap") {
      throw InputError("expected 'cap', found '" + kw.text + "'", kw.line,
                       kw.column);
    }
    declare(name.text, capacity_literal(), name);
  }

  GlobalProtocol expr() {
    GlobalProtocol l = seq();
    if (peek().kind == Tok::kPar) {
      take();
      return GlobalProtocol::par(l, expr());
    }
    return l;
  }

  GlobalProtocol seq() {
    GlobalProtocol l = atom();
    if (peek().kind == Tok::kSemi) {
      take();
      return GlobalProtocol::seq(l, seq());
    }
    return l;
  }

  EventRef event_ref() {
    Token p = expect(Tok::kIdent, "party name");
    EventRef e{PartyId{p.text}, {}};
    do {
      expect(Tok::kDot, "'.'");
      e.index.path.push_back(std::stoi(expect(Tok::kInt, "index").text));
    } while (peek().kind == Tok::kDot);
    return e;
  }

  GlobalProtocol atom() {
    const Token& t = peek();
    if (t.kind == Tok::kLParen) {
      take();
      GlobalProtocol g = expr();
      expect(Tok::kRParen, "')'");
      return g;
    }
    if (t.kind == Tok::kLBrack) {
      take();
      HbGuard gd;
      gd.lhs = event_ref();
      expect(Tok::kLess, "'<'");
      gd.rhs = event_ref();
      expect(Tok::kRBrack, "']'");
      return GlobalProtocol::leaf(gd);
    }
    if (t.kind == Tok::kIdent && t.text == "emp") {
      take();
      return GlobalProtocol::emp();
    }
    if (t.kind == Tok::kIdent) {
      Token from = take();
      expect(Tok::kDash, "'-' before channel");
      Token ch = expect(Tok::kIdent, "channel name");
      if (peek().kind == Tok::kColon) {
        take();
        declare(ch.text, capacity_literal(), ch);
      }
      expect(Tok::kArrow, "'->'");
      Token to = expect(Tok::kIdent, "receiver party");
      if (from.text == to.text) {
        throw InputError("self-transmission by party '" + from.text + "'",
                         from.line, from.column);
      }
      Transmission tr{PartyId{from.text}, Channel{ch.text, Capacity::any()},
                      std::nullopt, PartyId{to.text}};
      return GlobalProtocol::leaf(tr);
    }
    fail("expected transmission, guard, 'emp' or '('");
  }

  GlobalProtocol resolve_capacities(const GlobalProtocol& g) const {
    return g.map_leaves([this](const GlobalLeaf& l) {
      if (auto* t = std::get_if<Transmission>(&l)) {
        Transmission r = *t;
        auto it = declared_.find(r.channel.name);
        if (it != declared_.end()) r.channel.capacity = it->second;
        return GlobalProtocol::leaf(r);
      }
      return GlobalProtocol::leaf(l);
    });
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Capacity> declared_;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

GlobalProtocol parse_protocol(std::string_view text) {
  return Parser(lex(text)).parse();
}

// --------------------------------------------------------------- rendering

std::string render_leaf(const GlobalLeaf& l) {
  return std::visit(
      overloaded{
          [](const Transmission& t) {
            return t.sender.name + " -" + t.channel.name + "-> " +
                   t.receiver.name;
          },
          [](const HbGuard& g) { return g.to_string(); }},
      l);
}

std::string render_leaf(const PartyLeaf& l) {
  return std::visit(
      overloaded{
          [](const PartySend& s) {
            return s.channel.name + "!" + s.event.to_string();
          },
          [](const PartyRecv& r) {
            return r.channel.name + "?" + r.event.to_string();
          },
          [](const PartyGuard& g) {
            return "guard(" + g.channel.name + ", " + g.event.to_string() + ")";
          }},
      l);
}

namespace {

std::string render_payload(const std::shared_ptr<const DelegatedEndpoint>& p) {
  if (!p) return "";
  return "{" + p->channel.name + ": " + render_endpoint(p->protocol) + "}";
}

}  // namespace

std::string render_leaf(const EndpointLeaf& l) {
  return std::visit(
      overloaded{
          [](const EndpointSend& s) {
            return "!" + s.event.to_string() + render_payload(s.payload);
          },
          [](const EndpointRecv& r) {
            return "?" + r.event.to_string() + render_payload(r.payload);
          },
          [](const EndpointGuard& g) {
            return "guard(" + g.event.to_string() + ")";
          }},
      l);
}

namespace {

template <class Leaf>
std::string render_any(const ProtocolTree<Leaf>& t) {
  return render_tree(t, [](const Leaf& l) { return render_leaf(l); });
}

}  // namespace

std::string render_expr(const GlobalProtocol& g) { return render_any(g); }

std::string render_protocol(const GlobalProtocol& g) {
  std::string out;
  for (const auto& c : channels_of(g)) {
    if (!c.capacity.is_any()) {
      out += "chan " + c.name + " cap " + c.capacity.to_string() + "\n";
    }
  }
  return out + render_expr(g);
}

std::string render_party(const PerPartyProtocol& p) { return render_any(p); }

std::string render_endpoint(const PerEndpointProtocol& p) {
  return render_any(p);
}

// ----------------------------------------------------------- normalization

GlobalProtocol normalize(const GlobalProtocol& g) {
  return normalize_tree(g, [](const GlobalLeaf& l) { return render_leaf(l); });
}

PerPartyProtocol normalize(const PerPartyProtocol& p) {
  return normalize_tree(p, [](const PartyLeaf& l) { return render_leaf(l); });
}

PerEndpointProtocol normalize(const PerEndpointProtocol& p) {
  return normalize_tree(p, [](const EndpointLeaf& l) { return render_leaf(l); });
}

// ---------------------------------------------------------------- indexing

GlobalProtocol index_transmissions(const GlobalProtocol& g) {
  int next = 1;
  GlobalProtocol indexed = g.map_leaves([&next](const GlobalLeaf& l) {
    if (auto* t = std::get_if<Transmission>(&l)) {
      Transmission r = *t;
      r.index = TransIndex::of(next++);
      return GlobalProtocol::leaf(r);
    }
    return GlobalProtocol::leaf(l);
  });

  std::set<EventRef> known;
  for (const auto& t : transmissions_of(indexed)) {
    known.insert(t.send_event());
    known.insert(t.receive_event());
  }
  for (const auto& gd : guards_of(indexed)) {
    for (const auto& e : {gd.lhs, gd.rhs}) {
      if (!known.count(e)) {
        throw InputError("guard " + gd.to_string() + " references event " +
                         e.to_string() + " that no transmission carries");
      }
    }
  }
  return indexed;
}

// --------------------------------------------------------------- queries

std::vector<Transmission> transmissions_of(const GlobalProtocol& g) {
  std::vector<Transmission> out;
  g.for_each_leaf([&out](const GlobalLeaf& l) {
    if (auto* t = std::get_if<Transmission>(&l)) out.push_back(*t);
  });
  return out;
}

std::vector<HbGuard> guards_of(const GlobalProtocol& g) {
  std::vector<HbGuard> out;
  g.for_each_leaf([&out](const GlobalLeaf& l) {
    if (auto* h = std::get_if<HbGuard>(&l)) out.push_back(*h);
  });
  return out;
}

std::vector<PartyId> parties_of(const GlobalProtocol& g) {
  std::vector<PartyId> out;
  auto add = [&out](const PartyId& p) {
    for (const auto& q : out) {
      if (q == p) return;
    }
    out.push_back(p);
  };
  g.for_each_leaf([&add](const GlobalLeaf& l) {
    if (auto* t = std::get_if<Transmission>(&l)) {
      add(t->sender);
      add(t->receiver);
    } else {
      const auto& h = std::get<HbGuard>(l);
      add(h.lhs.party);
      add(h.rhs.party);
    }
  });
  return out;
}

std::vector<Channel> channels_of(const GlobalProtocol& g) {
  std::vector<Channel> out;
  for (const auto& t : transmissions_of(g)) {
    bool seen = false;
    for (const auto& c : out) seen = seen || c.name == t.channel.name;
    if (!seen) out.push_back(t.channel);
  }
  return out;
}

std::vector<ProtocolEvent> events_of(const GlobalProtocol& g) {
  std::vector<ProtocolEvent> out;
  for (const auto& t : transmissions_of(g)) {
    out.push_back({t.send_event(), EventKind::kSend, t.channel});
    out.push_back({t.receive_event(), EventKind::kReceive, t.channel});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// -------------------------------------------------------------- validation

namespace {

// (party, channel, kind) uses inside a subtree.
using Use = std::tuple<std::string, std::string, EventKind>;

std::set<Use> uses_of(const GlobalProtocol& g) {
  std::set<Use> out;
  for (const auto& t : transmissions_of(g)) {
    out.emplace(t.sender.name, t.channel.name, EventKind::kSend);
    out.emplace(t.receiver.name, t.channel.name, EventKind::kReceive);
  }
  return out;
}

void check_par(const GlobalProtocol& g, std::vector<Diagnostic>& out) {
  if (g.is_emp() || g.is_leaf()) return;
  if (g.is_par()) {
    auto l = uses_of(g.left());
    auto r = uses_of(g.right());
    std::set<std::pair<std::string, std::string>> reported;
    for (const auto& [party, chan, kind] : l) {
      EventKind dual =
          kind == EventKind::kSend ? EventKind::kReceive : EventKind::kSend;
      if (r.count({party, chan, dual}) && reported.emplace(party, chan).second) {
        out.push_back({"non-well-formed: party " + party +
                       " both sends and receives on channel " + chan +
                       " across concurrent branches of (" + render_expr(g) +
                       ")"});
      }
    }
  }
  check_par(g.left(), out);
  check_par(g.right(), out);
}

}  // namespace

std::vector<Diagnostic> validate(const GlobalProtocol& g) {
  std::vector<Diagnostic> out;
  for (const auto& t : transmissions_of(g)) {
    if (t.sender == t.receiver) {
      out.push_back({"self-transmission by party " + t.sender.name});
    }
  }
  check_par(g, out);
  return out;
}

GlobalProtocol load_protocol(std::string_view text) {
  GlobalProtocol g = index_transmissions(parse_protocol(text));
  auto diags = validate(g);
  if (!diags.empty()) {
    std::string msg;
    for (const auto& d : diags) msg += (msg.empty() ? "" : "; ") + d.message;
    throw InputError(msg);
  }
  return g;
}

}  // namespace chanrace
