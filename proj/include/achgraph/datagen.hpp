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
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "achgraph/cf.hpp"
#include "achgraph/dataset.hpp"
#include "achgraph/stats.hpp"

namespace achgraph::datagen {

enum class DatagenErrc { InfeasibleConfig, InvalidConfig, IoError };

class DatagenError : public std::runtime_error {
 public:
  DatagenError(DatagenErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  DatagenErrc code() const noexcept { return code_; }

 private:
  DatagenErrc code_;
};

/// Counts are given at scale 1. Vertex counts and the per-game edge kinds
/// (developed, genre links) scale linearly; friendships and ownership scale
/// with scale^2 so that their density stays fixed.
struct GenConfig {
  double scale = 1.0;
  std::uint64_t seed = 42;
  std::size_t players = 4159;
  std::size_t games = 4487;
  std::size_t developers = 1904;
  std::size_t genres = 30;
  std::size_t friendships = 272888;
  std::size_t ownership = 613769;
  std::size_t developed = 4589;
  std::size_t genre_links = 11229;
  stats::LomaxParams attainment{4.78, 0.61};
  double achievements_median = 20.0;
  double achievements_sigma = 0.8;
  std::size_t achievements_min = 1;
  std::size_t achievements_max = 200;
  /// Rank exponent of game popularity.
  double zipf_exponent = 1.5;
  /// Shares of engagement variance explained by a player factor and a game
  /// factor; the rest is per-pair noise.
  double player_correlation = 0.35;
  double game_correlation = 0.25;
  /// Multipliers applied to the attainment target of games whose primary
  /// genre matches. Stylized, not fitted.
  double strategy_shape_multiplier = 1.3;
  double role_playing_shape_multiplier = 0.8;
  double action_scale_multiplier = 1.2;
};

/// Applies the fields of a JSON object (text form) to a config. Unknown keys
/// and ill-typed values raise InvalidConfig.
void apply_overrides(GenConfig& config, std::string_view json_text);
GenConfig load_config(const std::filesystem::path& file, GenConfig base = {});

/// Counts after scaling and clamping, the targets generation aims for.
struct ScaledCounts {
  std::size_t players = 0, games = 0, developers = 0, genres = 0;
  std::size_t friendships = 0, ownership = 0, developed = 0, genre_links = 0;
};
/// Throws InvalidConfig for a non-positive scale or zero base counts and
/// InfeasibleConfig when friendships exceed the player-pair count or
/// ownership exceeds players x games.
ScaledCounts scaled_counts(const GenConfig& config);

struct GenReport {
  ScaledCounts target;
  DatasetSummary realized;
  /// KS distance of the recomputed attainment ratings to the target Lomax.
  double attainment_ks = 0.0;
  std::size_t rated_pairs = 0;
  /// Fraction of players in the largest friendship component.
  double giant_component = 0.0;
  /// Share of ownership edges held by the top 10% of games.
  double top_decile_share = 0.0;
};

struct Generated {
  DatasetRecords records;
  GenReport report;
};

Generated generate_records(const GenConfig& config);
/// Writes the dataset to `out` and returns the report.
GenReport generate(const GenConfig& config, const std::filesystem::path& out);
void write_report(std::ostream& out, const GenReport& report);

/// Per-game unlock matrix realizing a list of target ratings.
struct PlantResult {
  /// Row-major owners x achievements.
  std::vector<std::uint8_t> bits;
  /// Realized ratings, computed the way the engine does.
  std::vector<double> ratings;
};

/// Builds an unlock matrix whose ratings approximate `targets` (each within
/// [0, 1 - 1/n]). Columns get completion counts from a two-band design tuned
/// so that the rating mass matches the targets; rows are assigned greedily and
/// then repaired by swaps that reduce the distance in CDF space of `target`.
PlantResult plant_targets(std::span<const double> targets, std::size_t achievements, const stats::LomaxParams& target,
                          std::uint64_t seed);

/// Ratings with a known low-rank structure for recommender checks.
struct PlantedConfig {
  std::size_t users = 500;
  std::size_t items = 200;
  std::size_t rank = 5;
  double density = 0.1;
  double mean = 0.35;
  double bias_std = 0.1;
  double interaction_std = 0.1;
  double noise_std = 0.03;
  std::uint64_t seed = 7;
};

struct PlantedRatings {
  cf::RatingsTable table;
  /// Noise-free rating for every (user, item), row-major, clamped to [0,1].
  std::vector<double> truth;
  std::size_t users = 0;
  std::size_t items = 0;
  double truth_at(std::uint32_t user, std::uint32_t item) const { return truth[user * items + item]; }
};

PlantedRatings planted_ratings(const PlantedConfig& config);

}  // namespace achgraph::datagen
