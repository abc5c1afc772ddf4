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
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "achgraph/achievements.hpp"
#include "achgraph/graph.hpp"

namespace achgraph {

/// Name of the Owns edge attribute holding the attainment rating.
inline constexpr std::string_view kAttainmentAttr = "attainmentRating";

enum class AttainmentErrc { NoOwners, NotAnOwner, MissingAchievementRow };

class AttainmentError : public std::runtime_error {
 public:
  AttainmentError(AttainmentErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  AttainmentErrc code() const noexcept { return code_; }

 private:
  AttainmentErrc code_;
};

struct CompletionRates {
  VertexId game;
  /// Fraction of owners holding each achievement.
  std::vector<double> rates;
};

/// Column sums over the owner count. Throws NoOwners for an unowned game.
CompletionRates completion_rates(const AchievementTable& table);

/// Rates used for rating: the table's override when present, otherwise
/// completion_rates(table).
CompletionRates effective_rates(const AchievementTable& table);

/// Sum over unlocked achievements of (1 - rate), divided by the achievement
/// count. Zero for games without achievements.
double attainment_score(const AchievementTable& table, const CompletionRates& rates, VertexId player);

/// Ratings for every owner of the table, in owner order. Without an override
/// the value is computed as one integer ratio, so it never exceeds
/// (|owners| - 1) / |owners| even after rounding.
std::vector<double> attainment_scores(const AchievementTable& table);

/// Writes attainmentRating on every Owns edge. Must run before freeze().
/// Returns the number of edges written.
std::size_t annotate_graph(PropertyGraph& graph, std::span<const AchievementTable> tables);

struct GameRatingSummary {
  VertexId game;
  std::size_t owners = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Per-game min/max/mean of annotated ratings, in game order. Games without
/// owners are skipped.
std::vector<GameRatingSummary> rating_summaries(const PropertyGraph& graph);

}  // namespace achgraph
