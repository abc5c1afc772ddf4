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
#include <string>
#include <string_view>

#include "achgraph/query/ast.hpp"

namespace achgraph::query {

/// Friend-based recommendation query: games that friends of the player own
/// and that share a developer with a game the player owns, ranked by the
/// friends' average attainment rating.
Query recommendation_query(std::string_view steamid, std::int64_t limit = 5);

/// Adds ANTIPATTERNS V_P(a)-E_O-V_G(b). No-op when already present.
Query exclude_owned(Query q, std::string_view player_var = "a", std::string_view game_var = "b");

/// Adds the pattern V_G(b)-E_R-V_R and the condition V_R.description=genre,
/// replacing any earlier genre condition.
Query restrict_genre(Query q, std::string_view genre, std::string_view game_var = "b");

/// Literal for a steamid: integer when it fits, quoted text otherwise.
Literal steamid_literal(std::string_view steamid);

}  // namespace achgraph::query
