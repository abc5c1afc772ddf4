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

#include "achgraph/query/validate.hpp"

#include <algorithm>
#include <map>

namespace achgraph::query {

namespace {

std::size_t tap_count(const Pattern& p) {
  return static_cast<std::size_t>(std::count_if(p.edges.begin(), p.edges.end(), [](const EdgeAtom& e) { return e.tap; }));
}

void check_pattern(const Pattern& p) {
  if (p.vertices.empty() || p.edges.size() + 1 != p.vertices.size()) {
    throw std::invalid_argument("malformed pattern");
  }
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const VertexKind l = p.vertices[i].kind;
    const VertexKind r = p.vertices[i + 1].kind;
    if (!legal_triple(l, p.edges[i].kind, r)) {
      throw ValidationError(ValidationErrc::IllegalEdge, std::string(symbol(p.edges[i].kind)) + " cannot join " +
                                                             std::string(symbol(l)) + " and " +
                                                             std::string(symbol(r)));
    }
  }
  if (tap_count(p) > 1) {
    throw ValidationError(ValidationErrc::MultipleTaps, "pattern has more than one attribute tap");
  }
}

class KindTable {
 public:
  void note(const std::string& var, VertexKind kind) {
    auto [it, inserted] = kinds_.emplace(var, kind);
    if (!inserted && it->second != kind) {
      throw ValidationError(ValidationErrc::KindMismatch,
                            "variable " + var + " used as " + std::string(symbol(it->second)) + " and " +
                                std::string(symbol(kind)),
                            var);
    }
  }
  void note(const Pattern& p) {
    for (const auto& v : p.vertices) {
      if (v.var) note(*v.var, v.kind);
    }
  }
  void note(const AttrRef& r) {
    if (r.kind && !r.var.empty()) note(r.var, *r.kind);
  }

 private:
  std::map<std::string, VertexKind, std::less<>> kinds_;
};

void require_bound(const TypedQuery& tq, const std::string& var) {
  if (!tq.var_index(var)) throw ValidationError(ValidationErrc::UnboundVariable, "unbound variable " + var, var);
}

}  // namespace

std::optional<std::size_t> TypedQuery::var_index(std::string_view name) const {
  auto it = std::find(vars.begin(), vars.end(), name);
  if (it == vars.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vars.begin());
}

bool legal_triple(VertexKind left, EdgeKind edge, VertexKind right) {
  const EdgeSchema s = schema_of(edge);
  return (left == s.src && right == s.dst) || (left == s.dst && right == s.src);
}

TypedQuery validate(Query ast) {
  if (ast.select.empty() || ast.patterns.empty()) throw std::invalid_argument("query needs SELECT and PATTERNS");
  for (const auto& p : ast.patterns) check_pattern(p);
  for (const auto& p : ast.antipatterns) check_pattern(p);
  if (ast.orderby) check_pattern(ast.orderby->pattern);

  KindTable kinds;
  for (const auto& p : ast.patterns) kinds.note(p);
  for (const auto& p : ast.antipatterns) kinds.note(p);
  if (ast.orderby) kinds.note(ast.orderby->pattern);
  for (const auto& r : ast.select) kinds.note(r);
  for (const auto& c : ast.where) kinds.note(c.lhs);

  TypedQuery tq;
  for (const auto& p : ast.patterns) {
    for (const auto& v : p.vertices) {
      if (v.var && !tq.var_index(*v.var)) {
        tq.vars.push_back(*v.var);
        tq.kinds.push_back(v.kind);
      }
    }
  }
  for (const auto& r : ast.select) require_bound(tq, r.var);
  for (const auto& c : ast.where) {
    if (!c.lhs.kind_only()) {
      require_bound(tq, c.lhs.var);
      continue;
    }
    const VertexKind k = *c.lhs.kind;
    const bool present = std::any_of(ast.patterns.begin(), ast.patterns.end(), [&](const Pattern& p) {
      return std::any_of(p.vertices.begin(), p.vertices.end(),
                         [&](const VertexAtom& v) { return !v.var && v.kind == k; });
    });
    if (!present) {
      throw ValidationError(ValidationErrc::UnboundVariable,
                            "no anonymous " + std::string(symbol(k)) + " atom in PATTERNS", std::string(symbol(k)));
    }
  }
  for (const auto& p : ast.antipatterns) {
    for (const auto& v : p.vertices) {
      if (v.var) require_bound(tq, *v.var);
    }
  }
  if (ast.orderby) {
    for (const auto& v : ast.orderby->pattern.vertices) {
      if (v.var) require_bound(tq, *v.var);
    }
    if (tap_count(ast.orderby->pattern) == 0) {
      throw ValidationError(ValidationErrc::UntappedAggregate, "AVG pattern has no attribute tap");
    }
  }
  for (const auto& c : ast.where) {
    if (c.op != CompareOp::Eq && c.op != CompareOp::Ne && !c.rhs.is_numeric()) {
      throw ValidationError(ValidationErrc::NonNumericComparison,
                            "operator " + std::string(symbol(c.op)) + " needs a numeric literal");
    }
  }
  tq.ast = std::move(ast);
  return tq;
}

}  // namespace achgraph::query
