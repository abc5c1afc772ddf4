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

#include "oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>

#include "achgraph/attainment.hpp"
#include "achgraph/attr.hpp"

namespace achgraph::testing {

using namespace achgraph::query;

namespace {

std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string text_of(const Literal& lit) {
  if (auto* i = std::get_if<std::int64_t>(&lit.value)) return std::to_string(*i);
  if (auto* d = std::get_if<double>(&lit.value)) return shortest(*d);
  return std::get<std::string>(lit.value);
}

std::string text_of(const AttrValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto* d = std::get_if<double>(&v)) return shortest(*d);
  if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<std::string>(v);
}

bool numeric(const AttrValue& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

// Three-way numeric comparison; integer pairs compare exactly.
int cmp_num(const AttrValue& v, const Literal& lit) {
  if (std::holds_alternative<std::int64_t>(v) && std::holds_alternative<std::int64_t>(lit.value)) {
    auto a = std::get<std::int64_t>(v), b = std::get<std::int64_t>(lit.value);
    return (a > b) - (a < b);
  }
  double a = std::holds_alternative<double>(v) ? std::get<double>(v) : double(std::get<std::int64_t>(v));
  double b = std::holds_alternative<double>(lit.value) ? std::get<double>(lit.value)
                                                       : double(std::get<std::int64_t>(lit.value));
  return (a > b) - (a < b);
}

bool satisfies(const Vertex& v, const Condition& c) {
  auto it = v.attrs.find(c.lhs.attr);
  if (it == v.attrs.end()) return false;
  const bool lit_num = !std::holds_alternative<std::string>(c.rhs.value);
  switch (c.op) {
    case CompareOp::Eq:
    case CompareOp::Ne: {
      bool eq = numeric(it->second) && lit_num ? cmp_num(it->second, c.rhs) == 0
                                               : text_of(it->second) == text_of(c.rhs);
      return c.op == CompareOp::Eq ? eq : !eq;
    }
    default:
      break;
  }
  if (!numeric(it->second) || !lit_num) return false;
  int r = cmp_num(it->second, c.rhs);
  if (c.op == CompareOp::Lt) return r < 0;
  if (c.op == CompareOp::Le) return r <= 0;
  if (c.op == CompareOp::Gt) return r > 0;
  return r >= 0;
}

using Assign = std::function<std::optional<VertexId>(const std::string&)>;

// Calls `fn` with the edge list of every embedding. Stops early when fn
// returns false.
bool scan(const PropertyGraph& g, const Pattern& p, const Assign& assign,
          const std::vector<const Condition*>& anon_filters, const std::function<bool(const std::vector<EdgeId>&)>& fn) {
  std::vector<VertexId> vs(p.vertices.size());
  std::vector<EdgeId> es(p.edges.size());
  auto ok_vertex = [&](std::size_t i, VertexId v) {
    const VertexAtom& a = p.vertices[i];
    if (g.vertex(v).kind != a.kind) return false;
    if (a.var) {
      auto fixed = assign(*a.var);
      if (fixed) return *fixed == v;
      return true;
    }
    for (const Condition* c : anon_filters) {
      if (*c->lhs.kind == a.kind && !satisfies(g.vertex(v), *c)) return false;
    }
    return true;
  };
  // Variables free in `assign` must take a consistent value within one
  // embedding.
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i + 1 == p.vertices.size()) {
      for (std::size_t x = 0; x < p.vertices.size(); ++x) {
        for (std::size_t y = x + 1; y < p.vertices.size(); ++y) {
          if (p.vertices[x].var && p.vertices[x].var == p.vertices[y].var && vs[x] != vs[y]) return true;
        }
      }
      return fn(es);
    }
    const EdgeSchema s = schema_of(p.edges[i].kind);
    const VertexKind left = p.vertices[i].kind, right = p.vertices[i + 1].kind;
    for (const Edge& e : g.edges()) {
      if (e.kind != p.edges[i].kind) continue;
      std::optional<VertexId> next;
      if (left == s.src && right == s.dst && e.src == vs[i]) next = e.dst;
      if (left == s.dst && right == s.src && e.dst == vs[i]) next = e.src;
      if (!next || !ok_vertex(i + 1, *next)) continue;
      vs[i + 1] = *next;
      es[i] = e.id;
      if (!rec(i + 1)) return false;
    }
    return true;
  };
  for (const Vertex& v : g.vertices()) {
    if (!ok_vertex(0, v.id)) continue;
    vs[0] = v.id;
    if (!rec(0)) return false;
  }
  return true;
}

bool has_embedding(const PropertyGraph& g, const Pattern& p, const Assign& assign,
                   const std::vector<const Condition*>& anon_filters) {
  bool found = false;
  scan(g, p, assign, anon_filters, [&](const std::vector<EdgeId>&) {
    found = true;
    return false;
  });
  return found;
}

}  // namespace

std::size_t oracle_embedding_count(const PropertyGraph& g, const Pattern& p,
                                   const std::vector<std::pair<std::string, VertexId>>& fixed) {
  std::size_t n = 0;
  Assign assign = [&](const std::string& var) -> std::optional<VertexId> {
    for (const auto& [name, v] : fixed) {
      if (name == var) return v;
    }
    return std::nullopt;
  };
  scan(g, p, assign, {}, [&](const std::vector<EdgeId>&) {
    ++n;
    return true;
  });
  return n;
}

OracleResult oracle_evaluate(const TypedQuery& q, const PropertyGraph& g) {
  const Query& ast = q.ast;
  std::vector<const Condition*> anon_filters;
  for (const Condition& c : ast.where) {
    if (c.lhs.var.empty()) anon_filters.push_back(&c);
  }
  std::vector<VertexId> current(q.vars.size());
  Assign assign = [&](const std::string& var) -> std::optional<VertexId> {
    for (std::size_t i = 0; i < q.vars.size(); ++i) {
      if (q.vars[i] == var) return current[i];
    }
    return std::nullopt;
  };

  OracleResult out;
  std::function<void(std::size_t)> enumerate = [&](std::size_t k) {
    if (k < q.vars.size()) {
      for (const Vertex& v : g.vertices()) {
        if (v.kind != q.kinds[k]) continue;
        current[k] = v.id;
        enumerate(k + 1);
      }
      return;
    }
    for (const Condition& c : ast.where) {
      if (!c.lhs.var.empty() && !satisfies(g.vertex(*assign(c.lhs.var)), c)) return;
    }
    for (const Pattern& p : ast.patterns) {
      if (!has_embedding(g, p, assign, anon_filters)) return;
    }
    for (const Pattern& p : ast.antipatterns) {
      if (has_embedding(g, p, assign, {})) return;
    }
    OracleRow row;
    row.binding = current;
    for (const AttrRef& r : ast.select) {
      const auto& attrs = g.vertex(*assign(r.var)).attrs;
      auto it = attrs.find(r.attr);
      row.cells.push_back(it == attrs.end() ? std::string() : text_of(it->second));
    }
    if (ast.orderby) {
      const Pattern& agg = ast.orderby->pattern;
      std::size_t tap = 0;
      while (!agg.edges[tap].tap) ++tap;
      double sum = 0.0;
      std::size_t n = 0;
      scan(g, agg, assign, {}, [&](const std::vector<EdgeId>& es) {
        sum += *as_real(g.edge(es[tap]).attrs.at(*agg.edges[tap].tap));
        ++n;
        return true;
      });
      if (n) row.key = sum / double(n);
    }
    out.rows.push_back(std::move(row));
  };
  enumerate(0);

  const bool asc = ast.orderby && ast.orderby->dir == SortDir::Asc;
  std::stable_sort(out.rows.begin(), out.rows.end(), [&](const OracleRow& x, const OracleRow& y) {
    if (x.key && !y.key) return true;
    if (!x.key && y.key) return false;
    if (x.key && y.key && *x.key != *y.key) return asc ? *x.key < *y.key : *x.key > *y.key;
    return std::lexicographical_compare(x.binding.begin(), x.binding.end(), y.binding.begin(), y.binding.end());
  });
  out.total_rows = out.rows.size();
  if (ast.limit && out.rows.size() > std::size_t(*ast.limit)) out.rows.resize(std::size_t(*ast.limit));
  for (auto& row : out.rows) {
    if (ast.orderby) row.cells.push_back(row.key ? format_real(*row.key, 15) : std::string());
  }
  return out;
}

double oracle_rating(const std::vector<std::vector<int>>& bits, std::size_t owner) {
  const std::size_t players = bits.size();
  const std::size_t n = players ? bits[0].size() : 0;
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double holders = 0.0;
    for (std::size_t p = 0; p < players; ++p) holders += bits[p][i];
    const double c = holders / double(players);
    total += bits[owner][i] * (1.0 - c);
  }
  return total / double(n);
}

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

const std::vector<std::string> kGenreNames = {"Action", "Strategy", "Indie", "Casual", "Puzzle"};

std::vector<std::pair<EdgeKind, VertexKind>> steps_from(VertexKind k) {
  switch (k) {
    case VertexKind::Player: return {{EdgeKind::Friend, VertexKind::Player}, {EdgeKind::Owns, VertexKind::Game}};
    case VertexKind::Game:
      return {{EdgeKind::Owns, VertexKind::Player},
              {EdgeKind::DevelopedBy, VertexKind::Developer},
              {EdgeKind::HasGenre, VertexKind::Genre}};
    case VertexKind::Developer: return {{EdgeKind::DevelopedBy, VertexKind::Game}};
    case VertexKind::Genre: return {{EdgeKind::HasGenre, VertexKind::Game}};
  }
  return {};
}

std::vector<std::string> var_pool(VertexKind k) {
  switch (k) {
    case VertexKind::Player: return {"a", "c"};
    case VertexKind::Game: return {"b", "d"};
    case VertexKind::Developer: return {"x"};
    case VertexKind::Genre: return {"r"};
  }
  return {};
}

// Names atoms from `allowed` (or the full pool when empty).
Pattern random_walk(std::mt19937_64& rng, int max_edges, double named_p,
                    const std::vector<std::pair<std::string, VertexKind>>* allowed) {
  Pattern p;
  auto name_for = [&](VertexKind k) -> std::optional<std::string> {
    if (!chance(rng, named_p)) return std::nullopt;
    std::vector<std::string> names;
    if (allowed) {
      for (const auto& [n, kk] : *allowed) {
        if (kk == k) names.push_back(n);
      }
    } else {
      names = var_pool(k);
    }
    if (names.empty()) return std::nullopt;
    return pick(rng, names);
  };
  VertexKind k = pick(rng, std::vector<VertexKind>(kAllVertexKinds.begin(), kAllVertexKinds.end()));
  p.vertices.push_back({k, name_for(k)});
  const int edges = uniform(rng, 0, max_edges);
  for (int i = 0; i < edges; ++i) {
    auto [ek, next] = pick(rng, steps_from(k));
    p.edges.push_back({ek, std::nullopt});
    p.vertices.push_back({next, name_for(next)});
    k = next;
  }
  return p;
}

std::string attr_for(std::mt19937_64& rng, VertexKind k) {
  switch (k) {
    case VertexKind::Player: return pick(rng, std::vector<std::string>{"steamid", "name", "level"});
    case VertexKind::Game: return pick(rng, std::vector<std::string>{"name", "cost", "appid"});
    case VertexKind::Developer: return "name";
    case VertexKind::Genre: return "description";
  }
  return "name";
}

CompareOp random_op(std::mt19937_64& rng) {
  return pick(rng, std::vector<CompareOp>{CompareOp::Eq, CompareOp::Ne, CompareOp::Lt, CompareOp::Le, CompareOp::Gt,
                                          CompareOp::Ge});
}

Condition random_condition(std::mt19937_64& rng, const PropertyGraph& g, const std::string& var, VertexKind k) {
  Condition c;
  c.lhs.var = var;
  if (chance(rng, 0.3)) c.lhs.kind = k;
  switch (k) {
    case VertexKind::Player:
      if (chance(rng, 0.5)) {
        c.lhs.attr = "level";
        c.op = random_op(rng);
        c.rhs.value = std::int64_t{uniform(rng, 0, 4)};
      } else {
        c.lhs.attr = "steamid";
        c.op = chance(rng, 0.7) ? CompareOp::Eq : CompareOp::Ne;
        const auto players = g.vertices_of(VertexKind::Player);
        const auto& sid = std::get<std::string>(g.vertex(players[uniform(rng, 0, int(players.size()) - 1)]).attrs.at("steamid"));
        c.rhs.value = std::int64_t{std::stoll(sid)};
      }
      break;
    case VertexKind::Game:
      if (chance(rng, 0.6)) {
        c.lhs.attr = "cost";
        c.op = random_op(rng);
        c.rhs.value = pick(rng, std::vector<double>{0.0, 4.99, 9.99, 15.0, 19.99});
      } else {
        c.lhs.attr = "name";
        c.op = chance(rng, 0.7) ? CompareOp::Eq : CompareOp::Ne;
        c.rhs.value = "g" + std::to_string(uniform(rng, 0, 14));
      }
      break;
    case VertexKind::Developer:
      c.lhs.attr = "name";
      c.op = chance(rng, 0.5) ? CompareOp::Eq : CompareOp::Ne;
      c.rhs.value = "dev" + std::to_string(uniform(rng, 0, 5));
      break;
    case VertexKind::Genre:
      c.lhs.attr = "description";
      c.op = chance(rng, 0.7) ? CompareOp::Eq : CompareOp::Ne;
      c.rhs = Literal{pick(rng, kGenreNames), true};
      break;
  }
  return c;
}

}  // namespace

PropertyGraph random_graph(std::mt19937_64& rng) {
  PropertyGraph g;
  const int players = uniform(rng, 3, 15), games = uniform(rng, 3, 15);
  const int devs = uniform(rng, 1, 6), genres = uniform(rng, 1, 5);
  std::vector<VertexId> ps, gs, ds, rs;
  for (int i = 0; i < players; ++i) {
    AttrMap a{{"steamid", std::to_string(76561198000000000LL + i)}, {"name", "p" + std::to_string(i)}};
    if (chance(rng, 0.8)) a["level"] = std::int64_t{uniform(rng, 0, 4)};
    ps.push_back(g.add_vertex(VertexKind::Player, std::move(a)));
  }
  for (int i = 0; i < devs; ++i) {
    ds.push_back(g.add_vertex(VertexKind::Developer, {{"name", "dev" + std::to_string(i)}}));
  }
  for (int i = 0; i < genres; ++i) {
    rs.push_back(g.add_vertex(VertexKind::Genre, {{"description", kGenreNames[i]}}));
  }
  for (int i = 0; i < games; ++i) {
    AttrMap a{{"name", "g" + std::to_string(i)}, {"appid", std::int64_t{10 * (i + 1)}}};
    if (chance(rng, 0.9)) a["cost"] = pick(rng, std::vector<double>{0.0, 4.99, 9.99, 19.99, 59.99});
    gs.push_back(g.add_vertex(VertexKind::Game, std::move(a)));
  }
  const double friend_p = std::uniform_real_distribution<double>(0.05, 0.4)(rng);
  for (int i = 0; i < players; ++i) {
    for (int j = i + 1; j < players; ++j) {
      if (chance(rng, friend_p)) g.add_edge(EdgeKind::Friend, ps[i], ps[j]);
    }
  }
  const double own_p = std::uniform_real_distribution<double>(0.05, 0.4)(rng);
  const std::string tap(kAttainmentAttr);
  for (auto p : ps) {
    for (auto gm : gs) {
      if (chance(rng, own_p)) g.add_edge(EdgeKind::Owns, p, gm, {{tap, uniform(rng, 0, 15) / 16.0}});
    }
  }
  for (auto gm : gs) {
    std::vector<VertexId> dd = ds, rr = rs;
    std::shuffle(dd.begin(), dd.end(), rng);
    std::shuffle(rr.begin(), rr.end(), rng);
    const int nd = uniform(rng, chance(rng, 0.9) ? 1 : 0, std::min<int>(2, int(dd.size())));
    const int nr = uniform(rng, 0, std::min<int>(3, int(rr.size())));
    for (int i = 0; i < nd; ++i) g.add_edge(EdgeKind::DevelopedBy, gm, dd[i]);
    for (int i = 0; i < nr; ++i) g.add_edge(EdgeKind::HasGenre, gm, rr[i]);
  }
  return g;
}

Query random_query(std::mt19937_64& rng, const PropertyGraph& g) {
  for (;;) {
    Query q;
    const int npos = uniform(rng, 1, 3);
    for (int i = 0; i < npos; ++i) q.patterns.push_back(random_walk(rng, 3, 0.5, nullptr));

    std::vector<std::pair<std::string, VertexKind>> bound;
    bool anon_genre = false;
    for (const auto& p : q.patterns) {
      for (const auto& v : p.vertices) {
        if (!v.var) {
          anon_genre = anon_genre || v.kind == VertexKind::Genre;
          continue;
        }
        if (std::none_of(bound.begin(), bound.end(), [&](const auto& b) { return b.first == *v.var; })) {
          bound.emplace_back(*v.var, v.kind);
        }
      }
    }
    if (bound.empty() || bound.size() > 4) continue;

    const int nneg = uniform(rng, 0, 2);
    for (int i = 0; i < nneg; ++i) q.antipatterns.push_back(random_walk(rng, 2, 0.7, &bound));

    const int nsel = uniform(rng, 1, 2);
    for (int i = 0; i < nsel; ++i) {
      const auto& [var, kind] = pick(rng, bound);
      AttrRef r{std::nullopt, var, attr_for(rng, kind)};
      if (chance(rng, 0.3)) r.kind = kind;
      q.select.push_back(std::move(r));
    }
    const int nwhere = uniform(rng, 0, 2);
    for (int i = 0; i < nwhere; ++i) {
      const auto& [var, kind] = pick(rng, bound);
      q.where.push_back(random_condition(rng, g, var, kind));
    }
    if (anon_genre && chance(rng, 0.4)) {
      q.where.push_back({AttrRef{VertexKind::Genre, "", "description"}, CompareOp::Eq,
                         Literal{pick(rng, kGenreNames), true}});
    }
    if (chance(rng, 0.7)) {
      for (int attempt = 0; attempt < 50; ++attempt) {
        Pattern p = random_walk(rng, 3, 0.6, &bound);
        auto owns = std::find_if(p.edges.begin(), p.edges.end(), [](const EdgeAtom& e) { return e.kind == EdgeKind::Owns; });
        if (owns == p.edges.end()) continue;
        owns->tap = std::string(kAttainmentAttr);
        q.orderby = OrderBy{std::move(p), chance(rng, 0.3) ? SortDir::Asc : SortDir::Desc};
        break;
      }
    }
    if (chance(rng, 0.3)) q.limit = uniform(rng, 1, 5);
    try {
      validate(q);
    } catch (const ValidationError&) {
      continue;
    }
    return q;
  }
}

Query random_ast(std::mt19937_64& rng) {
  const std::vector<std::string> vars = {"a", "b", "c", "x1", "node_2", "_t", "Strategy"};
  const std::vector<std::string> attrs = {"name", "cost", "steamid", "attainmentRating", "limit", "x"};
  const std::vector<std::string> strings = {"", "plain", "with space", "quote\"inside", "back\\slash", "Role-Playing",
                                            "line\nbreak", "tab\there", "Point & Click"};
  auto vkind = [&] { return pick(rng, std::vector<VertexKind>(kAllVertexKinds.begin(), kAllVertexKinds.end())); };
  auto ekind = [&] { return pick(rng, std::vector<EdgeKind>(kAllEdgeKinds.begin(), kAllEdgeKinds.end())); };
  auto pattern = [&] {
    Pattern p;
    auto atom = [&] {
      VertexAtom a{vkind(), std::nullopt};
      if (chance(rng, 0.5)) a.var = pick(rng, vars);
      return a;
    };
    p.vertices.push_back(atom());
    const int n = uniform(rng, 0, 3);
    for (int i = 0; i < n; ++i) {
      EdgeAtom e{ekind(), std::nullopt};
      if (chance(rng, 0.25)) e.tap = pick(rng, attrs);
      p.edges.push_back(e);
      p.vertices.push_back(atom());
    }
    return p;
  };
  auto literal = [&]() -> Literal {
    switch (uniform(rng, 0, 4)) {
      case 0: return Literal{std::int64_t{std::uniform_int_distribution<std::int64_t>(-1000000, 1000000)(rng)}, false};
      case 1: return Literal{std::int64_t{76561197960265728LL + uniform(rng, 0, 1 << 20)}, false};
      case 2: {
        double v = std::uniform_real_distribution<double>(-1e3, 1e3)(rng);
        if (chance(rng, 0.2)) v = std::ldexp(v, uniform(rng, -900, 900));
        if (chance(rng, 0.1)) v = std::round(v);
        return Literal{v, false};
      }
      case 3: return Literal{pick(rng, strings), false};
      default: return Literal{pick(rng, std::vector<std::string>{"Strategy", "Action", "x_1", "Indie"}), true};
    }
  };
  Query q;
  const int nsel = uniform(rng, 1, 3);
  for (int i = 0; i < nsel; ++i) {
    AttrRef r{std::nullopt, pick(rng, vars), pick(rng, attrs)};
    if (chance(rng, 0.4)) r.kind = vkind();
    q.select.push_back(r);
  }
  const int npos = uniform(rng, 1, 3);
  for (int i = 0; i < npos; ++i) q.patterns.push_back(pattern());
  const int nneg = uniform(rng, 0, 2);
  for (int i = 0; i < nneg; ++i) q.antipatterns.push_back(pattern());
  const int nwhere = uniform(rng, 0, 3);
  for (int i = 0; i < nwhere; ++i) {
    Condition c;
    c.lhs = AttrRef{std::nullopt, pick(rng, vars), pick(rng, attrs)};
    const int form = uniform(rng, 0, 2);
    if (form == 1) c.lhs.kind = vkind();
    if (form == 2) {
      c.lhs.kind = vkind();
      c.lhs.var.clear();
    }
    c.op = random_op(rng);
    c.rhs = literal();
    q.where.push_back(c);
  }
  if (chance(rng, 0.5)) q.orderby = OrderBy{pattern(), chance(rng, 0.5) ? SortDir::Asc : SortDir::Desc};
  if (chance(rng, 0.5)) q.limit = std::uniform_int_distribution<std::int64_t>(1, 1000000000)(rng);
  return q;
}

}  // namespace achgraph::testing
