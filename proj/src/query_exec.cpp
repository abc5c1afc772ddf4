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

#include "achgraph/query/exec.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <unordered_set>

#include "achgraph/attr.hpp"

namespace achgraph::query {

namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

struct AtomPlan {
  VertexKind kind;
  int slot = -1;
  std::vector<const Condition*> filters;
};

struct StepPlan {
  EdgeKind kind;
  Direction dir;  // walking from atom i to atom i+1
  bool tapped = false;
  std::string tap;
};

struct PatternPlan {
  std::vector<AtomPlan> atoms;
  std::vector<StepPlan> steps;
};

using VarFilters = std::vector<std::vector<const Condition*>>;

Direction reverse(Direction d) {
  if (d == Direction::Out) return Direction::In;
  if (d == Direction::In) return Direction::Out;
  return Direction::Any;
}

int compare_numbers(const AttrValue& a, const Literal& lit) {
  const auto* ai = std::get_if<std::int64_t>(&a);
  const auto* li = std::get_if<std::int64_t>(&lit.value);
  if (ai && li) return *ai < *li ? -1 : (*ai > *li ? 1 : 0);
  const double x = *as_real(a);
  const double y = li ? static_cast<double>(*li) : std::get<double>(lit.value);
  return x < y ? -1 : (x > y ? 1 : 0);
}

std::string literal_text(const Literal& lit) {
  if (const auto* i = std::get_if<std::int64_t>(&lit.value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&lit.value)) return format_real(*d);
  return std::get<std::string>(lit.value);
}

// Missing attributes never satisfy a condition. Equality is numeric when both
// sides are numbers and textual otherwise, so a text steamid matches an
// integer literal. Ordering needs a numeric attribute.
bool holds(const AttrMap& attrs, const Condition& c) {
  auto it = attrs.find(c.lhs.attr);
  if (it == attrs.end()) return false;
  const AttrValue& v = it->second;
  if (c.op == CompareOp::Eq || c.op == CompareOp::Ne) {
    bool eq;
    if (is_numeric(v) && c.rhs.is_numeric()) {
      eq = compare_numbers(v, c.rhs) == 0;
    } else {
      eq = render(v) == literal_text(c.rhs);
    }
    return c.op == CompareOp::Eq ? eq : !eq;
  }
  if (!is_numeric(v) || !c.rhs.is_numeric()) return false;
  const int cmp = compare_numbers(v, c.rhs);
  switch (c.op) {
    case CompareOp::Lt: return cmp < 0;
    case CompareOp::Le: return cmp <= 0;
    case CompareOp::Gt: return cmp > 0;
    case CompareOp::Ge: return cmp >= 0;
    default: return false;
  }
}

bool all_hold(const PropertyGraph& g, VertexId v, const std::vector<const Condition*>& conds) {
  if (conds.empty()) return true;
  const AttrMap& attrs = g.vertex(v).attrs;
  return std::all_of(conds.begin(), conds.end(), [&](const Condition* c) { return holds(attrs, *c); });
}

template <typename SlotOf>
PatternPlan compile(const Pattern& p, SlotOf&& slot_of, const std::vector<const Condition*>* anon_filters) {
  PatternPlan plan;
  for (const VertexAtom& a : p.vertices) {
    AtomPlan ap{a.kind, a.var ? slot_of(*a.var) : -1, {}};
    if (!a.var && anon_filters) {
      for (const Condition* c : *anon_filters) {
        if (*c->lhs.kind == a.kind) ap.filters.push_back(c);
      }
    }
    plan.atoms.push_back(std::move(ap));
  }
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const EdgeSchema s = schema_of(p.edges[i].kind);
    Direction d = Direction::Any;
    if (!s.undirected) d = p.vertices[i].kind == s.src ? Direction::Out : Direction::In;
    StepPlan step{p.edges[i].kind, d, p.edges[i].tap.has_value(), p.edges[i].tap.value_or("")};
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

template <typename Fn>
void for_each_neighbor(const PropertyGraph& g, VertexId v, EdgeKind kind, Direction dir, Fn&& fn) {
  if (dir != Direction::In) {
    for (const Adjacent& a : g.adjacency(v, kind, Direction::Out)) fn(a);
  }
  if (dir != Direction::Out) {
    for (const Adjacent& a : g.adjacency(v, kind, Direction::In)) fn(a);
  }
}

std::optional<EdgeId> edge_between(const PropertyGraph& g, VertexId from, VertexId to, EdgeKind kind, Direction dir) {
  if (dir == Direction::In) return g.find_edge(kind, to, from);
  return g.find_edge(kind, from, to);
}

std::size_t degree(const PropertyGraph& g, VertexId v, EdgeKind kind, Direction dir) {
  std::size_t n = 0;
  if (dir != Direction::In) n += g.adjacency(v, kind, Direction::Out).size();
  if (dir != Direction::Out) n += g.adjacency(v, kind, Direction::In).size();
  return n;
}

// Backtracking matcher for one pattern over a shared slot vector. Slots
// already set act as constraints; the matcher assigns the rest while it
// explores and restores them before returning.
class Matcher {
 public:
  Matcher(const PropertyGraph& g, const PatternPlan& plan, std::vector<std::uint32_t>& slots,
          const VarFilters* var_filters)
      : g_(g), plan_(plan), slots_(slots), var_filters_(var_filters) {
    const std::size_t n = plan.atoms.size();
    vertex_.assign(n, kUnset);
    edge_.assign(plan.steps.size(), kUnset);
    assigned_here_.assign(n, false);
    failed_.resize(n);
    choose_start();
    for (std::size_t i = start_; i < n; ++i) order_.push_back(i);
    for (std::size_t i = start_; i-- > 0;) order_.push_back(i);
    for (const AtomPlan& a : plan.atoms) {
      if (a.slot >= 0 && slots_[a.slot] == kUnset &&
          std::find(new_slots_.begin(), new_slots_.end(), a.slot) == new_slots_.end()) {
        new_slots_.push_back(a.slot);
      }
    }
  }

  const std::vector<int>& new_slots() const { return new_slots_; }

  /// Distinct values of the new slots over all embeddings, sorted.
  std::vector<std::vector<std::uint32_t>> extensions() {
    mode_ = Mode::Extensions;
    found_.clear();
    dfs(0);
    std::sort(found_.begin(), found_.end());
    found_.erase(std::unique(found_.begin(), found_.end()), found_.end());
    return std::move(found_);
  }

  bool exists() {
    if (!new_slots_.empty()) {
      mode_ = Mode::Extensions;
      stop_at_first_ = true;
      found_.clear();
      dfs(0);
      stop_at_first_ = false;
      return !found_.empty();
    }
    return rest_exists(0);
  }

  void for_each_embedding(const std::function<void(const std::vector<std::uint32_t>&,
                                                   const std::vector<std::uint32_t>&)>& fn) {
    mode_ = Mode::Embeddings;
    on_embedding_ = &fn;
    dfs(0);
    on_embedding_ = nullptr;
  }

 private:
  enum class Mode { Extensions, Embeddings };

  bool slot_bound(std::size_t atom) const {
    const int s = plan_.atoms[atom].slot;
    return s >= 0 && slots_[s] != kUnset;
  }

  void choose_start() {
    const std::size_t n = plan_.atoms.size();
    std::size_t best = 0;
    std::size_t best_score = std::numeric_limits<std::size_t>::max();
    bool have_bound = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!slot_bound(i)) continue;
      const VertexId v{slots_[plan_.atoms[i].slot]};
      std::size_t score = 0;
      if (i > 0) score += degree(g_, v, plan_.steps[i - 1].kind, reverse(plan_.steps[i - 1].dir));
      if (i + 1 < n) score += degree(g_, v, plan_.steps[i].kind, plan_.steps[i].dir);
      if (!have_bound || score < best_score) {
        best = i;
        best_score = score;
        have_bound = true;
      }
    }
    if (have_bound) {
      start_ = best;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int s = plan_.atoms[i].slot;
      if (s >= 0 && var_filters_ && !(*var_filters_)[s].empty()) {
        start_ = i;
        return;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!plan_.atoms[i].filters.empty()) {
        start_ = i;
        return;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t score = g_.count(plan_.atoms[i].kind);
      if (score < best_score) {
        best = i;
        best_score = score;
      }
    }
    start_ = best;
  }

  // Checks atom constraints for v and, for an unset slot, assigns it.
  bool accept(std::size_t atom, std::uint32_t v) {
    const AtomPlan& a = plan_.atoms[atom];
    if (a.slot >= 0) {
      if (slots_[a.slot] != kUnset) return slots_[a.slot] == v;
      if (var_filters_ && !all_hold(g_, VertexId{v}, (*var_filters_)[a.slot])) return false;
      slots_[a.slot] = v;
      assigned_here_[atom] = true;
      return true;
    }
    return all_hold(g_, VertexId{v}, a.filters);
  }

  void release(std::size_t atom) {
    if (assigned_here_[atom]) {
      slots_[plan_.atoms[atom].slot] = kUnset;
      assigned_here_[atom] = false;
    }
  }

  bool check(std::size_t atom, std::uint32_t v) const {
    const AtomPlan& a = plan_.atoms[atom];
    if (a.slot >= 0) return slots_[a.slot] == v;
    return all_hold(g_, VertexId{v}, a.filters);
  }

  bool unset_slot_from(std::size_t k) const {
    for (std::size_t j = k; j < order_.size(); ++j) {
      const int s = plan_.atoms[order_[j]].slot;
      if (s >= 0 && slots_[s] == kUnset) return true;
    }
    return false;
  }

  // Can atoms beyond `atom` in direction `dir` be matched, given atom = v?
  bool chain_exists(std::size_t atom, std::uint32_t v, int dir) {
    const std::size_t n = plan_.atoms.size();
    if ((dir > 0 && atom + 1 == n) || (dir < 0 && atom == 0)) return true;
    const std::size_t next = dir > 0 ? atom + 1 : atom - 1;
    const StepPlan& step = plan_.steps[dir > 0 ? atom : atom - 1];
    const Direction d = dir > 0 ? step.dir : reverse(step.dir);
    const AtomPlan& a = plan_.atoms[next];
    if (a.slot >= 0) {
      const std::uint32_t target = slots_[a.slot];
      if (!edge_between(g_, VertexId{v}, VertexId{target}, step.kind, d)) return false;
      return chain_exists(next, target, dir);
    }
    bool ok = false;
    auto& failed = failed_[next];
    for_each_neighbor(g_, VertexId{v}, step.kind, d, [&](const Adjacent& adj) {
      if (ok) return;
      const std::uint32_t w = adj.vertex.value;
      if (failed.contains(w) || !all_hold(g_, adj.vertex, a.filters)) return;
      if (chain_exists(next, w, dir)) {
        ok = true;
      } else {
        failed.insert(w);
      }
    });
    return ok;
  }

  // Existence of a completion from order position k, all slots set.
  bool rest_exists(std::size_t k) {
    for (auto& f : failed_) f.clear();
    if (k == 0) {
      bool ok = false;
      for_start_candidates([&](std::uint32_t v) {
        if (ok || !check(start_, v)) return;
        ok = chain_exists(start_, v, +1) && chain_exists(start_, v, -1);
      });
      return ok;
    }
    const std::size_t atom = order_[k];
    if (atom > start_) {
      return chain_exists(atom - 1, vertex_[atom - 1], +1) && chain_exists(start_, vertex_[start_], -1);
    }
    return chain_exists(atom + 1, vertex_[atom + 1], -1);
  }

  template <typename Fn>
  void for_start_candidates(Fn&& fn) {
    const AtomPlan& a = plan_.atoms[start_];
    if (a.slot >= 0 && slots_[a.slot] != kUnset) {
      const VertexId v{slots_[a.slot]};
      if (g_.contains(v) && g_.vertex(v).kind == a.kind) fn(v.value);
      return;
    }
    for (VertexId v : g_.vertices_of(a.kind)) fn(v.value);
  }

  void emit() {
    if (mode_ == Mode::Embeddings) {
      (*on_embedding_)(vertex_, edge_);
      return;
    }
    std::vector<std::uint32_t> values;
    values.reserve(new_slots_.size());
    for (int s : new_slots_) values.push_back(slots_[s]);
    found_.push_back(std::move(values));
    if (stop_at_first_) done_ = true;
  }

  void visit(std::size_t k, std::size_t atom, std::uint32_t v) {
    if (!accept(atom, v)) return;
    vertex_[atom] = v;
    dfs(k + 1);
    vertex_[atom] = kUnset;
    release(atom);
  }

  void dfs(std::size_t k) {
    if (done_) return;
    if (k == order_.size()) {
      emit();
      return;
    }
    if (mode_ == Mode::Extensions && !unset_slot_from(k)) {
      if (rest_exists(k)) emit();
      return;
    }
    const std::size_t atom = order_[k];
    if (k == 0) {
      for_start_candidates([&](std::uint32_t v) {
        if (!done_) visit(0, atom, v);
      });
      return;
    }
    const bool right = atom > start_;
    const std::size_t prev = right ? atom - 1 : atom + 1;
    const std::size_t step_index = right ? atom - 1 : atom;
    const StepPlan& step = plan_.steps[step_index];
    const Direction d = right ? step.dir : reverse(step.dir);
    const VertexId from{vertex_[prev]};
    if (slot_bound(atom)) {
      const std::uint32_t target = slots_[plan_.atoms[atom].slot];
      if (auto e = edge_between(g_, from, VertexId{target}, step.kind, d)) {
        edge_[step_index] = e->value;
        visit(k, atom, target);
      }
      return;
    }
    for_each_neighbor(g_, from, step.kind, d, [&](const Adjacent& adj) {
      if (done_) return;
      edge_[step_index] = adj.edge.value;
      visit(k, atom, adj.vertex.value);
    });
  }

  const PropertyGraph& g_;
  const PatternPlan& plan_;
  std::vector<std::uint32_t>& slots_;
  const VarFilters* var_filters_;
  std::size_t start_ = 0;
  std::vector<std::size_t> order_;
  std::vector<int> new_slots_;
  std::vector<std::uint32_t> vertex_;
  std::vector<std::uint32_t> edge_;
  std::vector<bool> assigned_here_;
  std::vector<std::unordered_set<std::uint32_t>> failed_;
  Mode mode_ = Mode::Extensions;
  bool stop_at_first_ = false;
  bool done_ = false;
  std::vector<std::vector<std::uint32_t>> found_;
  const std::function<void(const std::vector<std::uint32_t>&, const std::vector<std::uint32_t>&)>* on_embedding_ =
      nullptr;
};

struct LocalPattern {
  PatternPlan plan;
  std::vector<std::string> vars;
  std::vector<std::uint32_t> slots;
};

LocalPattern local_plan(const Pattern& p, const SeedBinding& seed) {
  LocalPattern lp;
  auto slot_of = [&](const std::string& var) {
    auto it = std::find(lp.vars.begin(), lp.vars.end(), var);
    if (it != lp.vars.end()) return static_cast<int>(it - lp.vars.begin());
    lp.vars.push_back(var);
    return static_cast<int>(lp.vars.size() - 1);
  };
  lp.plan = compile(p, slot_of, nullptr);
  lp.slots.assign(lp.vars.size(), kUnset);
  for (std::size_t i = 0; i < lp.vars.size(); ++i) {
    if (auto it = seed.find(lp.vars[i]); it != seed.end()) lp.slots[i] = it->second.value;
  }
  return lp;
}

std::optional<double> average_tap(const PropertyGraph& g, const PatternPlan& plan, std::vector<std::uint32_t>& slots) {
  std::size_t tap_step = 0;
  while (tap_step < plan.steps.size() && !plan.steps[tap_step].tapped) ++tap_step;
  if (tap_step == plan.steps.size()) throw std::invalid_argument("aggregate pattern has no tap");
  const std::string& attr = plan.steps[tap_step].tap;
  double sum = 0.0;
  std::size_t n = 0;
  Matcher m(g, plan, slots, nullptr);
  m.for_each_embedding([&](const std::vector<std::uint32_t>&, const std::vector<std::uint32_t>& edges) {
    const Edge& e = g.edge(EdgeId{edges[tap_step]});
    auto it = e.attrs.find(attr);
    const std::optional<double> v = it == e.attrs.end() ? std::nullopt : as_real(it->second);
    if (!v) {
      throw TapAttributeMissing("edge #" + std::to_string(e.id.value) + " has no numeric '" + attr + "'");
    }
    sum += *v;
    ++n;
  });
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

std::vector<Embedding> embeddings(const PropertyGraph& g, const Pattern& p, const SeedBinding& seed) {
  LocalPattern lp = local_plan(p, seed);
  std::vector<Embedding> out;
  Matcher m(g, lp.plan, lp.slots, nullptr);
  m.for_each_embedding([&](const std::vector<std::uint32_t>& vs, const std::vector<std::uint32_t>& es) {
    Embedding e;
    for (auto v : vs) e.vertices.push_back(VertexId{v});
    for (auto x : es) e.edges.push_back(EdgeId{x});
    out.push_back(std::move(e));
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<double> aggregate_avg(const PropertyGraph& g, const Pattern& agg, const SeedBinding& binding) {
  LocalPattern lp = local_plan(agg, binding);
  return average_tap(g, lp.plan, lp.slots);
}

QueryResult evaluate(const TypedQuery& q, const PropertyGraph& g) {
  const Query& ast = q.ast;
  const std::size_t nvars = q.vars.size();
  auto slot_of = [&](const std::string& var) { return static_cast<int>(*q.var_index(var)); };

  VarFilters var_filters(nvars);
  std::vector<const Condition*> kind_filters;
  for (const Condition& c : ast.where) {
    if (c.lhs.kind_only()) {
      kind_filters.push_back(&c);
    } else {
      var_filters[slot_of(c.lhs.var)].push_back(&c);
    }
  }
  std::vector<PatternPlan> positive, negative;
  for (const auto& p : ast.patterns) positive.push_back(compile(p, slot_of, &kind_filters));
  for (const auto& p : ast.antipatterns) negative.push_back(compile(p, slot_of, nullptr));
  std::optional<PatternPlan> agg;
  if (ast.orderby) agg = compile(ast.orderby->pattern, slot_of, nullptr);

  std::vector<std::vector<std::uint32_t>> bindings;
  std::vector<std::uint32_t> slots(nvars, kUnset);
  std::function<void(std::size_t)> join = [&](std::size_t j) {
    if (j == positive.size()) {
      for (const PatternPlan& neg : negative) {
        if (Matcher(g, neg, slots, nullptr).exists()) return;
      }
      bindings.push_back(slots);
      return;
    }
    Matcher m(g, positive[j], slots, &var_filters);
    const std::vector<int> fresh = m.new_slots();
    for (const auto& values : m.extensions()) {
      for (std::size_t i = 0; i < fresh.size(); ++i) slots[fresh[i]] = values[i];
      join(j + 1);
    }
    for (int s : fresh) slots[s] = kUnset;
  };
  join(0);

  QueryResult result;
  for (const AttrRef& r : ast.select) result.columns.push_back(r.var + "." + r.attr);
  if (ast.orderby) result.columns.push_back("avg");

  result.rows.reserve(bindings.size());
  for (auto& b : bindings) {
    ResultRow row;
    for (auto v : b) row.binding.push_back(VertexId{v});
    if (agg) row.key = average_tap(g, *agg, b);
    for (const AttrRef& r : ast.select) {
      const AttrMap& attrs = g.vertex(row.binding[slot_of(r.var)]).attrs;
      auto it = attrs.find(r.attr);
      row.cells.push_back(it == attrs.end() ? std::nullopt : std::optional<AttrValue>(it->second));
    }
    result.rows.push_back(std::move(row));
  }

  const bool desc = !ast.orderby || ast.orderby->dir == SortDir::Desc;
  std::sort(result.rows.begin(), result.rows.end(), [&](const ResultRow& x, const ResultRow& y) {
    if (x.key.has_value() != y.key.has_value()) return x.key.has_value();
    if (x.key && *x.key != *y.key) return desc ? *x.key > *y.key : *x.key < *y.key;
    return x.binding < y.binding;
  });
  result.total_rows = result.rows.size();
  if (ast.limit && result.rows.size() > static_cast<std::size_t>(*ast.limit)) {
    result.rows.resize(static_cast<std::size_t>(*ast.limit));
  }
  return result;
}

std::vector<std::string> render_row(const QueryResult& result, const ResultRow& row) {
  std::vector<std::string> out;
  out.reserve(result.columns.size());
  for (const auto& cell : row.cells) out.push_back(cell ? render(*cell) : std::string());
  if (out.size() < result.columns.size()) out.push_back(row.key ? format_real(*row.key, 15) : std::string());
  return out;
}

}  // namespace achgraph::query
