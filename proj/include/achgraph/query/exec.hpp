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

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "achgraph/graph.hpp"
#include "achgraph/query/validate.hpp"

namespace achgraph::query {

class TapAttributeMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named-variable assignment used to seed pattern matching.
using SeedBinding = std::map<std::string, VertexId, std::less<>>;

/// One realization of a pattern: vertices[i] joined to vertices[i+1] by
/// edges[i]. Atoms may share a vertex (homomorphic matching).
struct Embedding {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;
  auto operator<=>(const Embedding&) const = default;
};

/// All embeddings consistent with the seed, sorted.
std::vector<Embedding> embeddings(const PropertyGraph& g, const Pattern& p, const SeedBinding& seed = {});

/// Mean of the tapped edge attribute over all embeddings consistent with the
/// binding; nullopt when there are none. Throws TapAttributeMissing when a
/// matched edge lacks a numeric value for the attribute.
std::optional<double> aggregate_avg(const PropertyGraph& g, const Pattern& agg, const SeedBinding& binding);

struct ResultRow {
  /// One cell per projection; nullopt where the vertex lacks the attribute.
  std::vector<std::optional<AttrValue>> cells;
  std::optional<double> key;
  /// Vertex per query variable, in TypedQuery::vars order.
  std::vector<VertexId> binding;
};

struct QueryResult {
  /// Projection labels, plus "avg" when the query orders by AVG.
  std::vector<std::string> columns;
  std::vector<ResultRow> rows;
  /// Row count before LIMIT.
  std::size_t total_rows = 0;
};

QueryResult evaluate(const TypedQuery& q, const PropertyGraph& g);

/// Text cells for one row: attribute rendering for projections, empty for
/// null, and the AVG key with 15 significant digits.
std::vector<std::string> render_row(const QueryResult& result, const ResultRow& row);

}  // namespace achgraph::query
