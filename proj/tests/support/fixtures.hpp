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

#include <filesystem>
#include <string>

#include "achgraph/graph.hpp"

namespace achgraph::testing {

/// Three players, two developers, three games, two genres. P1 is friends
/// with P2 and P3. Ownership ratings: P1-g1 0.5, P2-g2 0.8, P2-g3 0.9,
/// P3-g2 0.4. g1 and g3 are Strategy, g2 is Action.
struct FixtureF {
  PropertyGraph graph;
  VertexId p1, p2, p3;
  VertexId d1, d2;
  VertexId g1, g2, g3;
  VertexId strategy, action;
};

inline constexpr const char* kP1Steamid = "76561197960653976";

/// Built unfrozen so tests can add edges; call graph.freeze() before use if
/// needed.
FixtureF make_fixture_f(bool p1_owns_g2 = false);

std::filesystem::path fixture_dir();
std::string read_file(const std::filesystem::path& p);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace achgraph::testing
