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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "achgraph/dataset.hpp"
#include "achgraph/query/ast.hpp"
#include "achgraph/stats.hpp"

namespace achgraph::app {

struct AppConfig {
  std::filesystem::path data;
  std::string host = "127.0.0.1";
  int port = 8080;
  /// LIMIT applied to queries that carry none.
  std::int64_t default_limit = 100;
  std::uint64_t seed = 0;
  std::string cors_origin = "*";

  /// Throws UsageError for a port outside [1, 65535] or a nonpositive limit,
  /// DataError when the data directory is missing.
  void check(bool allow_any_port = false) const;
};

/// Bad command line or request parameters.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or unusable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Query text that fails to parse or validate. Validation errors carry no
/// position.
class QueryFailure : public std::runtime_error {
 public:
  QueryFailure(std::optional<std::size_t> line, std::optional<std::size_t> column, const std::string& message)
      : std::runtime_error(message), line_(line), column_(column) {}
  std::optional<std::size_t> line() const noexcept { return line_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  std::optional<std::size_t> line_;
  std::optional<std::size_t> column_;
};

struct QueryResponse {
  std::vector<std::string> columns;
  /// Rendered cells, one per column.
  std::vector<std::vector<std::string>> rows;
  double elapsed_ms = 0.0;
  /// Row count before LIMIT.
  std::size_t total_rows = 0;
  /// Canonical text of the executed query.
  std::string query;
};

struct RecommendationRequest {
  std::string steamid;
  bool exclude_owned = false;
  std::optional<std::string> genre;
  std::int64_t n = 5;
};

/// Annotated, frozen dataset plus the read-only operations served over the
/// CLI and HTTP. Every const method is safe to call concurrently.
class Service {
 public:
  explicit Service(Dataset dataset, std::int64_t default_limit = 100);
  /// Loads the dataset directory, annotates ratings and freezes the graph.
  static Service load(const std::filesystem::path& dir, std::int64_t default_limit = 100);

  const PropertyGraph& graph() const noexcept { return dataset_.graph; }
  const Dataset& dataset() const noexcept { return dataset_; }

  QueryResponse run_query(std::string_view text) const;
  QueryResponse run_query(query::Query q) const;
  /// The friend-based recommendation query for one player, with the
  /// requested refinements. Throws NotFound for an unknown steamid.
  QueryResponse recommendations(const RecommendationRequest& request) const;
  std::vector<stats::HistogramSpec> attainment_histograms(std::size_t bins) const;
  const nlohmann::ordered_json& schema() const noexcept { return schema_; }

 private:
  Dataset dataset_;
  std::int64_t default_limit_;
  nlohmann::ordered_json schema_;
};

nlohmann::ordered_json to_json(const QueryResponse& response);
nlohmann::ordered_json to_json(const std::vector<stats::HistogramSpec>& hists);
nlohmann::ordered_json to_json(const QueryFailure& failure);

/// Rows as tab-separated lines, optionally preceded by the column names.
std::string to_tsv(const QueryResponse& response, bool header = false);

}  // namespace achgraph::app
