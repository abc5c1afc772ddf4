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

#include "achgraph/query/refine.hpp"

#include <algorithm>
#include <charconv>

#include "achgraph/query/parser.hpp"

namespace achgraph::query {

namespace {

VertexAtom atom(VertexKind k, std::string_view var = {}) {
  VertexAtom a{k, std::nullopt};
  if (!var.empty()) a.var = std::string(var);
  return a;
}

}  // namespace

Literal steamid_literal(std::string_view steamid) {
  std::int64_t v = 0;
  const char* last = steamid.data() + steamid.size();
  auto [ptr, ec] = std::from_chars(steamid.data(), last, v);
  const bool digits_only = !steamid.empty() && std::all_of(steamid.begin(), steamid.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
  if (digits_only && ec == std::errc() && ptr == last && std::to_string(v) == steamid) return Literal{v, false};
  return Literal{std::string(steamid), false};
}

Query recommendation_query(std::string_view steamid, std::int64_t limit) {
  Query q = parse(
      "SELECT V_G(b).name, V_G(b).cost "
      "PATTERNS V_P(a)-E_F-V_P-E_O-V_G(b) V_P(a)-E_O-V_G-E_D-V_D-E_D-V_G(b) "
      "WHERE V_P(a).steamid=0 "
      "ORDERBY AVG(V_P(a)-E_F-V_P-E_O.attainmentRating-V_G(b))");
  q.where.front().rhs = steamid_literal(steamid);
  q.limit = limit;
  return q;
}

Query exclude_owned(Query q, std::string_view player_var, std::string_view game_var) {
  Pattern p;
  p.vertices = {atom(VertexKind::Player, player_var), atom(VertexKind::Game, game_var)};
  p.edges = {EdgeAtom{EdgeKind::Owns, std::nullopt}};
  if (std::find(q.antipatterns.begin(), q.antipatterns.end(), p) == q.antipatterns.end()) {
    q.antipatterns.push_back(std::move(p));
  }
  return q;
}

Query restrict_genre(Query q, std::string_view genre, std::string_view game_var) {
  Pattern p;
  p.vertices = {atom(VertexKind::Game, game_var), atom(VertexKind::Genre)};
  p.edges = {EdgeAtom{EdgeKind::HasGenre, std::nullopt}};
  if (std::find(q.patterns.begin(), q.patterns.end(), p) == q.patterns.end()) q.patterns.push_back(std::move(p));

  const AttrRef lhs{VertexKind::Genre, "", "description"};
  std::erase_if(q.where, [&](const Condition& c) { return c.lhs == lhs && c.op == CompareOp::Eq; });
  const bool bare = is_plain_identifier(genre);
  q.where.push_back(Condition{lhs, CompareOp::Eq, Literal{std::string(genre), bare}});
  return q;
}

}  // namespace achgraph::query
