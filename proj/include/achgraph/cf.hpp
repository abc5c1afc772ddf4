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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "achgraph/graph.hpp"

namespace achgraph::cf {

enum class CfErrc { EmptyData, TooFewRatings, DuplicateRating, InvalidParams, ModelFormat, IoError };

class CfError : public std::runtime_error {
 public:
  CfError(CfErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  CfErrc code() const noexcept { return code_; }

 private:
  CfErrc code_;
};

struct Triple {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double rating = 0.0;
  friend bool operator==(const Triple&, const Triple&) = default;
};

/// (user, item, rating) triples with dense indices and the external keys
/// (steamid, appid) behind them.
class RatingsTable {
 public:
  /// Index for a user key, assigned on first use.
  std::uint32_t user_index(std::string_view steamid);
  std::uint32_t item_index(std::int64_t appid);
  std::optional<std::uint32_t> find_user(std::string_view steamid) const;
  std::optional<std::uint32_t> find_item(std::int64_t appid) const;

  /// Throws DuplicateRating for a second rating of the same pair.
  void add(std::string_view steamid, std::int64_t appid, double rating);
  /// Index-only insertion; grows the key tables with synthetic keys as needed.
  void add(std::uint32_t user, std::uint32_t item, double rating);

  const std::vector<Triple>& triples() const noexcept { return triples_; }
  const std::vector<std::string>& users() const noexcept { return users_; }
  const std::vector<std::int64_t>& items() const noexcept { return items_; }
  std::size_t n_users() const noexcept { return users_.size(); }
  std::size_t n_items() const noexcept { return items_.size(); }
  std::size_t size() const noexcept { return triples_.size(); }

 private:
  std::vector<Triple> triples_;
  std::vector<std::string> users_;
  std::vector<std::int64_t> items_;
  std::unordered_map<std::string, std::uint32_t> user_ids_;
  std::unordered_map<std::int64_t, std::uint32_t> item_ids_;
  std::unordered_map<std::uint64_t, std::size_t> pairs_;
};

/// One triple per Owns edge carrying an attainment rating. Users are keyed by
/// steamid and items by appid, indexed in graph order.
RatingsTable ratings_from_graph(const PropertyGraph& graph);

/// Order of SGD steps within an epoch.
enum class Schedule : std::uint8_t {
  /// One step per training triple in a shuffled order. The implicit sum is
  /// recomputed and every y_j of N(u) updated at each step.
  PerRating,
  /// Users in shuffled order, each user's ratings shuffled; the implicit sum
  /// is computed once per user and y_j updates are applied after the user's
  /// ratings. Linear in the ratings count, for large datasets.
  PerUser,
};

struct TrainParams {
  std::size_t factors = 20;
  std::size_t epochs = 20;
  double learning_rate = 0.007;
  double regularization = 0.02;
  double init_std = 0.1;
  std::uint64_t seed = 0;
  Schedule schedule = Schedule::PerRating;
};

struct SvdppModel {
  std::size_t factors = 0;
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  double mu = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> bu, bi;
  /// Row-major factor matrices: n_users x factors, n_items x factors.
  std::vector<double> p, q, y;
  /// N(u) in CSR form: items of user u are implicit[offsets[u] .. offsets[u+1]).
  std::vector<std::uint64_t> offsets;
  std::vector<std::uint32_t> implicit;
  /// External keys; empty when trained from bare indices.
  std::vector<std::string> user_keys;
  std::vector<std::int64_t> item_keys;

  std::span<const std::uint32_t> rated_by(std::size_t user) const {
    return {implicit.data() + offsets[user], implicit.data() + offsets[user + 1]};
  }
  std::optional<std::uint32_t> find_user(std::string_view steamid) const;
  std::optional<std::uint32_t> find_item(std::int64_t appid) const;

  friend bool operator==(const SvdppModel&, const SvdppModel&) = default;
};

/// Model with μ, N(u) and seeded initial parameters; no SGD steps taken.
/// Biases start at zero; factor entries are drawn from N(0, init_std) with
/// std::mt19937_64(seed), filling p, then q, then y, row-major. The epoch
/// shuffles use a second generator seeded from the same seed.
SvdppModel init_model(std::span<const Triple> data, std::size_t n_users, std::size_t n_items,
                      const TrainParams& params);

/// Throws EmptyData without triples and InvalidParams for non-positive
/// factors or rates.
SvdppModel train(std::span<const Triple> data, std::size_t n_users, std::size_t n_items, const TrainParams& params);
SvdppModel train(const RatingsTable& data, const TrainParams& params);

/// Unclamped r̂_ui for in-range indices.
double predict_raw(const SvdppModel& model, std::uint32_t user, std::uint32_t item);
/// Clamped to [0,1]. Out-of-range indices fall back to the bias terms present.
double predict(const SvdppModel& model, std::optional<std::uint32_t> user, std::optional<std::uint32_t> item);
double predict(const SvdppModel& model, std::uint32_t user, std::uint32_t item);

/// Mean squared error of clamped predictions over the triples.
double training_mse(const SvdppModel& model, std::span<const Triple> data);

/// Regularized squared error of one example:
/// 0.5 (r - r̂)^2 + 0.5 reg (b_u^2 + b_i^2 + |p_u|^2 + |q_i|^2 + sum_j |y_j|^2).
double example_loss(const SvdppModel& model, const Triple& t, double reg);

struct Gradient {
  double bu = 0.0;
  double bi = 0.0;
  std::vector<double> pu, qi;
  /// One block per item of N(u), in rated_by order.
  std::vector<std::vector<double>> y;
};
/// Gradient of example_loss with respect to the parameters it touches.
Gradient example_gradient(const SvdppModel& model, const Triple& t, double reg);
/// Single SGD step: every touched parameter moves by -lr times its gradient.
void sgd_step(SvdppModel& model, const Triple& t, double lr, double reg);

/// Binary, versioned. Loading reproduces the model bit for bit.
void save_model(const SvdppModel& model, const std::filesystem::path& file);
SvdppModel load_model(const std::filesystem::path& file);

struct FoldMetrics {
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double rmse = 0.0;
  double mae = 0.0;
  /// Predicting the training-fold mean for every test triple.
  double baseline_rmse = 0.0;
  double baseline_mae = 0.0;
};

/// Fold of each triple: a seeded shuffle dealt round-robin into k folds.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed);

/// Throws TooFewRatings when k < 2 or there are fewer than k triples.
std::vector<FoldMetrics> cross_validate(std::span<const Triple> data, std::size_t n_users, std::size_t n_items,
                                        const TrainParams& params, std::size_t k = 5);
std::vector<FoldMetrics> cross_validate(const RatingsTable& data, const TrainParams& params, std::size_t k = 5);

struct Recommendation {
  std::uint32_t item = 0;
  double score = 0.0;
  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

/// Best n candidates by prediction, ties by ascending item index. With
/// exclude_rated, items in N(user) are dropped first.
std::vector<Recommendation> recommend_top_n(const SvdppModel& model, std::uint32_t user,
                                            std::span<const std::uint32_t> candidates, std::size_t n,
                                            bool exclude_rated = true);

}  // namespace achgraph::cf
