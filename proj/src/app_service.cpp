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


#include "achgraph/app/service.hpp"

#include <chrono>
#include <set>

#include "achgraph/attainment.hpp"
#include "achgraph/query/exec.hpp"
#include "achgraph/query/parser.hpp"
#include "achgraph/query/refine.hpp"
#include "achgraph/query/validate.hpp"

namespace achgraph::app {

using nlohmann::ordered_json;

void AppConfig::check(bool allow_any_port) const {
  if (port < (allow_any_port ? 0 : 1) || port > 65535) {
    throw UsageError("port must be in [1, 65535], got " + std::to_string(port));
  }
  if (default_limit < 1) throw UsageError("default limit must be positive");
  std::error_code ec;
  if (data.empty() || !std::filesystem::is_directory(data, ec)) {
    throw DataError("data directory not found: " + data.string());
  }
}

namespace {

ordered_json build_schema(const PropertyGraph& g) {
  ordered_json vertices = ordered_json::array();
  for (const auto kind : kAllVertexKinds) {
    std::set<std::string> attrs;
    for (const auto v : g.vertices_of(kind)) {
      for (const auto& [k, _] : g.vertex(v).attrs) attrs.insert(k);
    }
    vertices.push_back({{"kind", std::string(name(kind))},
                        {"symbol", std::string(symbol(kind))},
                        {"count", g.count(kind)},
                        {"attributes", attrs}});
  }
  std::array<std::set<std::string>, kAllEdgeKinds.size()> edge_attrs;
  for (const auto& e : g.edges()) {
    for (const auto& [k, _] : e.attrs) edge_attrs[static_cast<std::size_t>(e.kind)].insert(k);
  }
  ordered_json edges = ordered_json::array();
  for (const auto kind : kAllEdgeKinds) {
    const auto s = schema_of(kind);
    edges.push_back({{"kind", std::string(name(kind))},
                     {"symbol", std::string(symbol(kind))},
                     {"from", std::string(symbol(s.src))},
                     {"to", std::string(symbol(s.dst))},
                     {"undirected", s.undirected},
                     {"count", g.count(kind)},
                     {"attributes", edge_attrs[static_cast<std::size_t>(kind)]}});
  }
  return {{"vertices", vertices}, {"edges", edges}};
}

}  // namespace

Service::Service(Dataset dataset, std::int64_t default_limit)
    : dataset_(std::move(dataset)), default_limit_(default_limit) {
  if (default_limit_ < 1) throw UsageError("default limit must be positive");
  if (!dataset_.graph.frozen()) {
    annotate_graph(dataset_.graph, dataset_.achievements);
    dataset_.graph.freeze();
  }
  schema_ = build_schema(dataset_.graph);
}

Service Service::load(const std::filesystem::path& dir, std::int64_t default_limit) {
  return Service(load_dataset(dir), default_limit);
}

QueryResponse Service::run_query(std::string_view text) const {
  query::Query q;
  try {
    q = query::parse(text);
  } catch (const query::SyntaxError& e) {
    throw QueryFailure(e.line(), e.column(), "expected " + e.expected() + ", found " + e.found());
  }
  return run_query(std::move(q));
}

QueryResponse Service::run_query(query::Query q) const {
  const auto start = std::chrono::steady_clock::now();
  if (!q.limit) q.limit = default_limit_;
  QueryResponse out;
  out.query = query::unparse(q);
  query::TypedQuery typed;
  try {
    typed = query::validate(std::move(q));
  } catch (const query::ValidationError& e) {
    throw QueryFailure(std::nullopt, std::nullopt, e.what());
  }
  const auto result = query::evaluate(typed, dataset_.graph);
  out.columns = result.columns;
  out.total_rows = result.total_rows;
  out.rows.reserve(result.rows.size());
  for (const auto& row : result.rows) out.rows.push_back(query::render_row(result, row));
  out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

QueryResponse Service::recommendations(const RecommendationRequest& request) const {
  if (request.n < 1) throw UsageError("n must be positive");
  if (!dataset_.graph.find_player(request.steamid)) throw NotFound("unknown player " + request.steamid);
  auto q = query::recommendation_query(request.steamid, request.n);
  if (request.exclude_owned) q = query::exclude_owned(std::move(q));
  if (request.genre) q = query::restrict_genre(std::move(q), *request.genre);
  return run_query(std::move(q));
}

std::vector<stats::HistogramSpec> Service::attainment_histograms(std::size_t bins) const {
  if (bins == 0) throw UsageError("bins must be positive");
  return stats::genre_histograms(dataset_.graph, bins);
}

ordered_json to_json(const QueryResponse& response) {
  return {{"columns", response.columns},
          {"rows", response.rows},
          {"elapsed_ms", response.elapsed_ms},
          {"total_rows", response.total_rows},
          {"query", response.query}};
}

ordered_json to_json(const std::vector<stats::HistogramSpec>& hists) {
  ordered_json out = ordered_json::array();
  for (const auto& h : hists) {
    out.push_back({{"group", h.group}, {"count", h.count}, {"edges", h.edges}, {"densities", h.densities}});
  }
  return out;
}

ordered_json to_json(const QueryFailure& failure) {
  ordered_json out;
  out["line"] = failure.line() ? ordered_json(*failure.line()) : ordered_json(nullptr);
  out["column"] = failure.column() ? ordered_json(*failure.column()) : ordered_json(nullptr);
  out["message"] = failure.what();
  return out;
}

std::string to_tsv(const QueryResponse& response, bool header) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += '\t';
      out += cells[i];
    }
    out += '\n';
  };
  if (header) line(response.columns);
  for (const auto& row : response.rows) line(row);
  return out;
}

}  // namespace achgraph::app
