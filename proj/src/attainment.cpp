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

#include "achgraph/attainment.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_set>

namespace achgraph {

namespace {

std::string describe(const PropertyGraph& g, VertexId player, VertexId game) {
  std::string who = "player #" + std::to_string(player.value);
  std::string what = "game #" + std::to_string(game.value);
  if (g.contains(player)) {
    if (auto it = g.vertex(player).attrs.find("steamid"); it != g.vertex(player).attrs.end()) {
      who = "player " + render(it->second);
    }
  }
  if (g.contains(game)) {
    if (auto it = g.vertex(game).attrs.find("appid"); it != g.vertex(game).attrs.end()) {
      what = "game " + render(it->second);
    }
  }
  return who + ", " + what;
}

std::vector<std::uint32_t> column_counts(const AchievementTable& t) {
  std::vector<std::uint32_t> counts(t.n_achievements, 0);
  for (std::size_t s = 0; s < t.owners.size(); ++s) {
    const auto row = t.row(s);
    for (std::size_t i = 0; i < t.n_achievements; ++i) counts[i] += row[i];
  }
  return counts;
}

}  // namespace

CompletionRates completion_rates(const AchievementTable& table) {
  if (table.owners.empty()) {
    throw AttainmentError(AttainmentErrc::NoOwners, "game #" + std::to_string(table.game.value) + " has no owners");
  }
  CompletionRates out{table.game, {}};
  const auto counts = column_counts(table);
  const double n = static_cast<double>(table.owners.size());
  out.rates.reserve(counts.size());
  for (auto c : counts) out.rates.push_back(static_cast<double>(c) / n);
  return out;
}

CompletionRates effective_rates(const AchievementTable& table) {
  if (table.rate_override) return {table.game, *table.rate_override};
  return completion_rates(table);
}

double attainment_score(const AchievementTable& table, const CompletionRates& rates, VertexId player) {
  const auto idx = table.owner_index(player);
  if (!idx) {
    throw AttainmentError(AttainmentErrc::NotAnOwner, "player #" + std::to_string(player.value) +
                                                          " does not own game #" + std::to_string(table.game.value));
  }
  if (table.n_achievements == 0) return 0.0;
  if (!table.has_row.empty() && !table.has_row[*idx]) {
    throw AttainmentError(AttainmentErrc::MissingAchievementRow,
                          "no achievement record for player #" + std::to_string(player.value) + ", game #" +
                              std::to_string(table.game.value));
  }
  const auto row = table.row(*idx);
  double sum = 0.0;
  for (std::size_t i = 0; i < table.n_achievements; ++i) {
    if (row[i]) sum += 1.0 - rates.rates[i];
  }
  return sum / static_cast<double>(table.n_achievements);
}

std::vector<double> attainment_scores(const AchievementTable& table) {
  const std::size_t n_owners = table.owners.size();
  std::vector<double> out(n_owners, 0.0);
  if (table.n_achievements == 0 || n_owners == 0) return out;

  if (table.rate_override) {
    const CompletionRates rates = effective_rates(table);
    for (std::size_t s = 0; s < n_owners; ++s) out[s] = attainment_score(table, rates, table.owners[s]);
    return out;
  }
  const auto counts = column_counts(table);
  const double denom = static_cast<double>(n_owners) * static_cast<double>(table.n_achievements);
  for (std::size_t s = 0; s < n_owners; ++s) {
    if (!table.has_row.empty() && !table.has_row[s]) {
      throw AttainmentError(AttainmentErrc::MissingAchievementRow,
                            "no achievement record for player #" + std::to_string(table.owners[s].value) +
                                ", game #" + std::to_string(table.game.value));
    }
    const auto row = table.row(s);
    std::uint64_t numer = 0;
    for (std::size_t i = 0; i < table.n_achievements; ++i) {
      if (row[i]) numer += n_owners - counts[i];
    }
    out[s] = static_cast<double>(numer) / denom;
  }
  return out;
}

std::size_t annotate_graph(PropertyGraph& graph, std::span<const AchievementTable> tables) {
  std::size_t written = 0;
  std::unordered_set<VertexId> covered;
  for (const AchievementTable& t : tables) {
    covered.insert(t.game);
    std::vector<double> scores;
    try {
      scores = attainment_scores(t);
    } catch (const AttainmentError& e) {
      if (e.code() != AttainmentErrc::MissingAchievementRow) throw;
      for (std::size_t s = 0; s < t.owners.size(); ++s) {
        if (!t.has_row[s]) {
          throw AttainmentError(AttainmentErrc::MissingAchievementRow,
                                "no achievement record for " + describe(graph, t.owners[s], t.game));
        }
      }
      throw;
    }
    for (std::size_t s = 0; s < t.owners.size(); ++s) {
      const auto e = graph.find_edge(EdgeKind::Owns, t.owners[s], t.game);
      if (!e) {
        throw AttainmentError(AttainmentErrc::NotAnOwner, "no Owns edge for " + describe(graph, t.owners[s], t.game));
      }
      graph.set_edge_attr(*e, kAttainmentAttr, scores[s]);
      ++written;
    }
  }
  if (written != graph.count(EdgeKind::Owns)) {
    for (const Edge& e : graph.edges()) {
      if (e.kind == EdgeKind::Owns && !covered.contains(e.dst)) {
        throw AttainmentError(AttainmentErrc::MissingAchievementRow,
                              "no achievement table for " + describe(graph, e.src, e.dst));
      }
    }
  }
  return written;
}

std::vector<GameRatingSummary> rating_summaries(const PropertyGraph& graph) {
  std::vector<GameRatingSummary> out;
  for (VertexId game : graph.vertices_of(VertexKind::Game)) {
    GameRatingSummary s{game};
    double sum = 0.0;
    for (const Adjacent& adj : graph.adjacency(game, EdgeKind::Owns, Direction::In)) {
      const auto& attrs = graph.edge(adj.edge).attrs;
      auto it = attrs.find(kAttainmentAttr);
      if (it == attrs.end()) continue;
      const double v = as_real(it->second).value_or(0.0);
      if (s.owners == 0) {
        s.min = s.max = v;
      } else {
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
      }
      sum += v;
      ++s.owners;
    }
    if (s.owners == 0) continue;
    s.mean = sum / static_cast<double>(s.owners);
    out.push_back(s);
  }
  return out;
}

}  // namespace achgraph
