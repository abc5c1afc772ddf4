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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "achgraph/graph.hpp"

namespace achgraph {

/// Per-game achievement completion matrix: one row per owner, one column per
/// achievement. Owners are the players holding an Owns edge to the game, in
/// ascending id order.
struct AchievementTable {
  VertexId game;
  std::size_t n_achievements = 0;
  /// Column labels, in column order. May be empty for tables built in code.
  std::vector<std::string> names;
  std::vector<VertexId> owners;
  /// Row-major |owners| x n_achievements, entries 0 or 1.
  std::vector<std::uint8_t> bits;
  /// False where the dataset carried no achievement record for the owner.
  std::vector<bool> has_row;
  /// Externally supplied completion rates, replacing the in-dataset ones.
  std::optional<std::vector<double>> rate_override;

  std::span<const std::uint8_t> row(std::size_t owner_index) const {
    return {bits.data() + owner_index * n_achievements, n_achievements};
  }
  std::span<std::uint8_t> row(std::size_t owner_index) {
    return {bits.data() + owner_index * n_achievements, n_achievements};
  }
  std::optional<std::size_t> owner_index(VertexId player) const;
};

}  // namespace achgraph
