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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "achgraph/graph.hpp"

namespace achgraph::query {

struct VertexAtom {
  VertexKind kind = VertexKind::Player;
  std::optional<std::string> var;
  bool operator==(const VertexAtom&) const = default;
};

struct EdgeAtom {
  EdgeKind kind = EdgeKind::Friend;
  /// Attribute read by AVG, written E_O.attainmentRating.
  std::optional<std::string> tap;
  bool operator==(const EdgeAtom&) const = default;
};

/// Path pattern: vertices[i] -edges[i]- vertices[i+1].
struct Pattern {
  std::vector<VertexAtom> vertices;
  std::vector<EdgeAtom> edges;
  bool operator==(const Pattern&) const = default;
};

/// Attribute reference. Written b.name, V_G(b).name, or (conditions only)
/// V_R.description, which has a kind and no variable.
struct AttrRef {
  std::optional<VertexKind> kind;
  std::string var;
  std::string attr;
  bool kind_only() const { return var.empty(); }
  bool operator==(const AttrRef&) const = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Literal {
  std::variant<std::int64_t, double, std::string> value;
  /// String given as an unquoted identifier.
  bool bare = false;
  bool is_numeric() const { return !std::holds_alternative<std::string>(value); }
  bool operator==(const Literal&) const = default;
};

struct Condition {
  AttrRef lhs;
  CompareOp op = CompareOp::Eq;
  Literal rhs;
  bool operator==(const Condition&) const = default;
};

enum class SortDir { Asc, Desc };

struct OrderBy {
  Pattern pattern;
  SortDir dir = SortDir::Desc;
  bool operator==(const OrderBy&) const = default;
};

struct Query {
  std::vector<AttrRef> select;
  std::vector<Pattern> patterns;
  std::vector<Pattern> antipatterns;
  std::vector<Condition> where;
  std::optional<OrderBy> orderby;
  std::optional<std::int64_t> limit;
  bool operator==(const Query&) const = default;
};

std::string_view symbol(CompareOp op);

}  // namespace achgraph::query
