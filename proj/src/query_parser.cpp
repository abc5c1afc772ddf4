// Copyright 2026 The achgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "achgraph/query/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "achgraph/attr.hpp"

namespace achgraph::query {

namespace {

enum class Tok { Keyword, Kind, Ident, Number, String, LParen, RParen, Comma, Dot, Dash, Op, End };

enum class Kw { Select, Patterns, Antipatterns, Where, And, OrderBy, Avg, Asc, Desc, Limit };

constexpr std::array<std::pair<std::string_view, Kw>, 10> kKeywords = {{
    {"SELECT", Kw::Select},
    {"PATTERNS", Kw::Patterns},
    {"ANTIPATTERNS", Kw::Antipatterns},
    {"WHERE", Kw::Where},
    {"AND", Kw::And},
    {"ORDERBY", Kw::OrderBy},
    {"AVG", Kw::Avg},
    {"ASC", Kw::Asc},
    {"DESC", Kw::Desc},
    {"LIMIT", Kw::Limit},
}};

struct Token {
  Tok type = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  Kw kw = Kw::Select;
  bool is_vertex_kind = false;
  VertexKind vkind = VertexKind::Player;
  EdgeKind ekind = EdgeKind::Friend;
  CompareOp op = CompareOp::Eq;
};

std::optional<Kw> keyword(std::string_view word) {
  for (const auto& [text, kw] : kKeywords) {
    if (text.size() == word.size() &&
        std::equal(text.begin(), text.end(), word.begin(),
                   [](char a, char b) { return a == std::toupper(static_cast<unsigned char>(b)); })) {
      return kw;
    }
  }
  return std::nullopt;
}

std::optional<VertexKind> vertex_kind(std::string_view word) {
  for (VertexKind k : kAllVertexKinds) {
    if (symbol(k) == word) return k;
  }
  return std::nullopt;
}

std::optional<EdgeKind> edge_kind(std::string_view word) {
  for (EdgeKind k : kAllEdgeKinds) {
    if (symbol(k) == word) return k;
  }
  return std::nullopt;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string describe(const Token& t) {
  if (t.type == Tok::End) return "end of input";
  if (t.type == Tok::String) return "string literal";
  return "'" + t.text + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= text_.size()) {
        t.type = Tok::End;
        end_position(t);
        out.push_back(t);
        return out;
      }
      const char c = text_[pos_];
      if (ident_start(c)) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
        t.text = std::string(text_.substr(start, pos_ - start));
        if (auto kw = keyword(t.text)) {
          t.type = Tok::Keyword;
          t.kw = *kw;
        } else if (auto vk = vertex_kind(t.text)) {
          t.type = Tok::Kind;
          t.is_vertex_kind = true;
          t.vkind = *vk;
        } else if (auto ek = edge_kind(t.text)) {
          t.type = Tok::Kind;
          t.ekind = *ek;
        } else {
          t.type = Tok::Ident;
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.type = Tok::Number;
        t.text = number();
      } else if (c == '"') {
        t.type = Tok::String;
        t.text = string_literal(t);
      } else {
        advance();
        t.text = std::string(1, c);
        switch (c) {
          case '(': t.type = Tok::LParen; break;
          case ')': t.type = Tok::RParen; break;
          case ',': t.type = Tok::Comma; break;
          case '.': t.type = Tok::Dot; break;
          case '-': t.type = Tok::Dash; break;
          case '=': t.type = Tok::Op; t.op = CompareOp::Eq; break;
          case '!':
            if (pos_ < text_.size() && text_[pos_] == '=') {
              advance();
              t.type = Tok::Op;
              t.op = CompareOp::Ne;
              t.text = "!=";
              break;
            }
            throw SyntaxError(t.line, t.column, "'!='", "'!'");
          case '<':
          case '>': {
            const bool eq = pos_ < text_.size() && text_[pos_] == '=';
            if (eq) advance();
            t.type = Tok::Op;
            t.op = c == '<' ? (eq ? CompareOp::Le : CompareOp::Lt) : (eq ? CompareOp::Ge : CompareOp::Gt);
            t.text = eq ? std::string{c, '='} : std::string(1, c);
            break;
          }
          default:
            throw SyntaxError(t.line, t.column, "token", "'" + t.text + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  // End-of-input errors point at the last character so positions stay inside
  // the text.
  void end_position(Token& t) const {
    if (text_.empty()) return;
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    t.line = line;
    t.column = column;
  }

  std::string number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    };
    digits();
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      advance();
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        while (pos_ < look) advance();
        digits();
      }
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string string_literal(const Token& t) {
    advance();
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) break;
        const char e = text_[pos_];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: throw SyntaxError(line_, column_, "escape sequence", std::string("'\\") + e + "'");
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    throw SyntaxError(t.line, t.column, "closing '\"'", "end of input");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Query query() {
    Query q;
    expect_keyword(Kw::Select, "SELECT");
    q.select.push_back(projection());
    while (peek().type == Tok::Comma) {
      next();
      q.select.push_back(projection());
    }
    expect_keyword(Kw::Patterns, "PATTERNS");
    q.patterns.push_back(pattern());
    while (at_vertex_kind()) q.patterns.push_back(pattern());
    if (at_keyword(Kw::Antipatterns)) {
      next();
      q.antipatterns.push_back(pattern());
      while (at_vertex_kind()) q.antipatterns.push_back(pattern());
    }
    if (at_keyword(Kw::Where)) {
      next();
      q.where.push_back(condition());
      while (at_keyword(Kw::And)) {
        next();
        q.where.push_back(condition());
      }
    }
    if (at_keyword(Kw::OrderBy)) {
      next();
      expect_keyword(Kw::Avg, "AVG");
      expect(Tok::LParen, "'('");
      OrderBy ob;
      ob.pattern = pattern();
      expect(Tok::RParen, "')'");
      if (at_keyword(Kw::Asc)) {
        next();
        ob.dir = SortDir::Asc;
      } else if (at_keyword(Kw::Desc)) {
        next();
      }
      q.orderby = std::move(ob);
    }
    if (at_keyword(Kw::Limit)) {
      next();
      const Token& t = peek();
      if (t.type != Tok::Number) fail("positive integer");
      std::int64_t n = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
      if (ec != std::errc() || ptr != t.text.data() + t.text.size() || n <= 0) fail("positive integer");
      next();
      q.limit = n;
    }
    if (peek().type != Tok::End) fail(trailing_expectation(q));
    return q;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw SyntaxError(t.line, t.column, expected, describe(t));
  }

  bool at_keyword(Kw kw) const { return peek().type == Tok::Keyword && peek().kw == kw; }
  bool at_vertex_kind() const { return peek().type == Tok::Kind && peek().is_vertex_kind; }

  void expect_keyword(Kw kw, const char* label) {
    if (!at_keyword(kw)) fail(label);
    next();
  }

  const Token& expect(Tok type, const char* label) {
    if (peek().type != type) fail(label);
    return next();
  }

  std::string identifier(const char* label) {
    if (peek().type != Tok::Ident) fail(label);
    return next().text;
  }

  // Attribute names may collide with keywords (e.g. "desc").
  std::string attribute() {
    if (peek().type != Tok::Ident && peek().type != Tok::Keyword) fail("attribute name");
    return next().text;
  }

  static std::string trailing_expectation(const Query& q) {
    std::string out;
    if (q.where.empty() && !q.orderby && !q.limit) {
      out = q.antipatterns.empty() ? "vertex kind, ANTIPATTERNS, WHERE, ORDERBY, LIMIT or end of input"
                                   : "vertex kind, WHERE, ORDERBY, LIMIT or end of input";
    } else if (!q.orderby && !q.limit) {
      out = q.where.empty() ? "ORDERBY, LIMIT or end of input" : "AND, ORDERBY, LIMIT or end of input";
    } else if (!q.limit) {
      out = "LIMIT or end of input";
    } else {
      out = "end of input";
    }
    return out;
  }

  VertexAtom vertex_atom() {
    if (!at_vertex_kind()) fail("vertex kind (V_P, V_G, V_D, V_R)");
    VertexAtom atom{next().vkind, std::nullopt};
    if (peek().type == Tok::LParen) {
      next();
      atom.var = identifier("variable name");
      expect(Tok::RParen, "')'");
    }
    return atom;
  }

  EdgeAtom edge_atom() {
    if (peek().type != Tok::Kind || peek().is_vertex_kind) fail("edge kind (E_F, E_O, E_D, E_R)");
    EdgeAtom atom{next().ekind, std::nullopt};
    if (peek().type == Tok::Dot) {
      next();
      atom.tap = attribute();
    }
    return atom;
  }

  Pattern pattern() {
    Pattern p;
    p.vertices.push_back(vertex_atom());
    while (peek().type == Tok::Dash) {
      next();
      p.edges.push_back(edge_atom());
      expect(Tok::Dash, "'-'");
      p.vertices.push_back(vertex_atom());
    }
    return p;
  }

  AttrRef attr_ref(bool allow_kind_only) {
    AttrRef ref;
    if (peek().type == Tok::Ident) {
      ref.var = next().text;
    } else if (at_vertex_kind()) {
      ref.kind = next().vkind;
      if (peek().type == Tok::LParen) {
        next();
        ref.var = identifier("variable name");
        expect(Tok::RParen, "')'");
      } else if (!allow_kind_only) {
        fail("'('");
      }
    } else {
      fail("variable or vertex kind");
    }
    expect(Tok::Dot, "'.'");
    ref.attr = attribute();
    return ref;
  }

  AttrRef projection() { return attr_ref(false); }

  Condition condition() {
    Condition c;
    c.lhs = attr_ref(true);
    if (peek().type != Tok::Op) fail("comparison operator");
    c.op = next().op;
    c.rhs = literal();
    return c;
  }

  Literal literal() {
    const Token& t = peek();
    if (t.type == Tok::String) {
      Literal lit{next().text, false};
      return lit;
    }
    if (t.type == Tok::Ident) return Literal{next().text, true};
    bool negative = false;
    if (t.type == Tok::Dash && toks_[pos_ + 1].type == Tok::Number) {
      negative = true;
      next();
    }
    if (peek().type != Tok::Number) fail("literal");
    const Token& num = peek();
    const char* first = num.text.data();
    const char* last = first + num.text.size();
    const bool real = num.text.find_first_of(".eE") != std::string::npos;
    if (real) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail("finite number");
      next();
      return Literal{negative ? -v : v, false};
    }
    std::uint64_t mag = 0;
    auto [ptr, ec] = std::from_chars(first, last, mag);
    const std::uint64_t limit = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + (negative ? 1 : 0);
    if (ec != std::errc() || ptr != last || mag > limit) fail("integer within 64-bit range");
    next();
    const std::int64_t v = negative ? static_cast<std::int64_t>(0 - mag) : static_cast<std::int64_t>(mag);
    return Literal{v, false};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void append_atom(std::string& out, const VertexAtom& a) {
  out += symbol(a.kind);
  if (a.var) {
    out += '(';
    out += *a.var;
    out += ')';
  }
}

std::string unparse_ref(const AttrRef& r) {
  std::string out;
  if (r.kind) {
    out += symbol(*r.kind);
    if (!r.var.empty()) out += "(" + r.var + ")";
  } else {
    out += r.var;
  }
  out += '.';
  out += r.attr;
  return out;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t line, std::size_t column, std::string expected, std::string found)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": expected " + expected + ", found " +
                         found),
      line_(line),
      column_(column),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

std::string_view symbol(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "=";
}

bool is_plain_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s.front())) return false;
  if (!std::all_of(s.begin(), s.end(), ident_char)) return false;
  return !keyword(s) && !vertex_kind(s) && !edge_kind(s);
}

Query parse(std::string_view text) { return Parser(Lexer(text).run()).query(); }

std::string unparse(const Pattern& p) {
  std::string out;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (i > 0) {
      const EdgeAtom& e = p.edges[i - 1];
      out += '-';
      out += symbol(e.kind);
      if (e.tap) {
        out += '.';
        out += *e.tap;
      }
      out += '-';
    }
    append_atom(out, p.vertices[i]);
  }
  return out;
}

std::string unparse(const Literal& lit) {
  if (const auto* i = std::get_if<std::int64_t>(&lit.value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&lit.value)) {
    std::string s = format_real(*d);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  }
  const auto& s = std::get<std::string>(lit.value);
  if (lit.bare && is_plain_identifier(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string unparse(const Condition& c) {
  return unparse_ref(c.lhs) + std::string(symbol(c.op)) + unparse(c.rhs);
}

std::string unparse(const Query& q) {
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < q.select.size(); ++i) {
    if (i) out += ", ";
    out += unparse_ref(q.select[i]);
  }
  out += " PATTERNS";
  for (const auto& p : q.patterns) out += " " + unparse(p);
  if (!q.antipatterns.empty()) {
    out += " ANTIPATTERNS";
    for (const auto& p : q.antipatterns) out += " " + unparse(p);
  }
  for (std::size_t i = 0; i < q.where.size(); ++i) {
    out += i ? " AND " : " WHERE ";
    out += unparse(q.where[i]);
  }
  if (q.orderby) {
    out += " ORDERBY AVG(" + unparse(q.orderby->pattern) + ")";
    if (q.orderby->dir == SortDir::Asc) out += " ASC";
  }
  if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
  return out;
}

}  // namespace achgraph::query
