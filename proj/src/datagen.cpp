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


#include "achgraph/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "achgraph/attainment.hpp"

namespace achgraph::datagen {

namespace {

using Rng = std::mt19937_64;

constexpr std::array<std::string_view, 30> kGenreNames = {
    "Action", "Indie", "Adventure", "Strategy", "Role-Playing", "Casual", "Simulation", "Free to Play",
    "Massively Multiplayer", "Racing", "Sports", "Early Access", "Violent", "Gore", "Design & Illustration",
    "Animation & Modeling", "Utilities", "Education", "Audio Production", "Video Production", "Web Publishing",
    "Software Training", "Photo Editing", "Game Development", "Accounting", "Nudity", "Sexual Content", "Movie",
    "Documentary", "Short"};

constexpr std::array<double, 9> kPrices = {0.0, 0.99, 4.99, 9.99, 14.99, 19.99, 29.99, 39.99, 59.99};
constexpr std::array<double, 9> kPriceWeights = {8, 6, 14, 22, 14, 14, 10, 6, 6};

constexpr std::uint64_t kSteamBase = 76561197960265728ULL;

enum Stream : std::uint64_t { kPlayers = 1, kGames, kGenres, kDevelopers, kFriends, kOwnership, kEngagement, kPlant };

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(splitmix(splitmix(seed ^ (stream * 0x632be59bd9b4e019ULL)) + index));
}

double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Weighted sampling with updates: Fenwick tree over weights.
class WeightedSampler {
 public:
  explicit WeightedSampler(std::size_t n) : tree_(n + 1, 0.0), weights_(n, 0.0) {}
  void set(std::size_t i, double w) {
    const double delta = w - weights_[i];
    weights_[i] = w;
    total_ += delta;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }
  double weight(std::size_t i) const { return weights_[i]; }
  double total() const { return total_; }
  std::size_t sample(Rng& rng) const {
    double target = uniform(rng) * total_;
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    // Guard against landing on a zero-weight slot through rounding.
    while (pos < weights_.size() && weights_[pos] <= 0.0) ++pos;
    if (pos >= weights_.size()) {
      pos = weights_.size() - 1;
      while (pos > 0 && weights_[pos] <= 0.0) --pos;
    }
    return pos;
  }

 private:
  std::vector<double> tree_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

/// k distinct indices drawn with probability proportional to weight
/// (exponential keys).
std::vector<std::size_t> weighted_subset(std::span<const double> weights, std::size_t k, Rng& rng) {
  std::vector<std::pair<double, std::size_t>> keys(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    keys[i] = {std::log(1.0 - uniform(rng)) / weights[i], i};
  }
  k = std::min(k, keys.size());
  std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(keys[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t scale_linear(std::size_t base, double s) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(base) * s));
}

std::size_t scale_square(std::size_t base, double s) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(base) * s * s));
}

std::string padded(std::string_view prefix, std::size_t i, int width) {
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return std::string(prefix) + digits;
}

/// Integer allocation of `total` units proportional to weights, each slot at
/// most `cap`, by water-filling then largest remainder.
std::vector<std::size_t> capped_allocation(std::span<const double> weights, std::size_t total, std::size_t cap) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> out(n, 0);
  if (n == 0 || total == 0 || cap == 0) return out;
  auto filled = [&](double k) {
    double s = 0.0;
    for (const double w : weights) s += std::min(static_cast<double>(cap), k * w);
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (filled(hi) < static_cast<double>(total)) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (filled(mid) < static_cast<double>(total) ? lo : hi) = mid;
  }
  std::vector<std::pair<double, std::size_t>> frac;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::min(static_cast<double>(cap), hi * weights[i]);
    out[i] = std::min(cap, static_cast<std::size_t>(std::floor(x)));
    assigned += out[i];
    frac.emplace_back(x - std::floor(x), i);
  }
  std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % n) {
    auto& slot = out[frac[k].second];
    if (slot < cap) {
      ++slot;
      ++assigned;
    }
  }
  while (assigned > total) {
    for (std::size_t i = 0; i < n && assigned > total; ++i) {
      if (out[i] > 0) {
        --out[i];
        --assigned;
      }
    }
  }
  return out;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::uint64_t pair_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  const auto& v = j.at(key);
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw DatagenError(DatagenErrc::InvalidConfig, std::string(key) + " must be a number");
    out = v.get<double>();
  } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>) {
    if (!v.is_number_unsigned()) throw DatagenError(DatagenErrc::InvalidConfig, std::string(key) + " must be a nonnegative integer");
    out = v.get<T>();
  }
}

}  // namespace

void apply_overrides(GenConfig& c, std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DatagenError(DatagenErrc::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DatagenError(DatagenErrc::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const char* k = key.c_str();
    if (key == "scale") read_field(j, k, c.scale);
    else if (key == "seed") read_field(j, k, c.seed);
    else if (key == "players") read_field(j, k, c.players);
    else if (key == "games") read_field(j, k, c.games);
    else if (key == "developers") read_field(j, k, c.developers);
    else if (key == "genres") read_field(j, k, c.genres);
    else if (key == "friendships") read_field(j, k, c.friendships);
    else if (key == "ownership") read_field(j, k, c.ownership);
    else if (key == "developed") read_field(j, k, c.developed);
    else if (key == "genre_links") read_field(j, k, c.genre_links);
    else if (key == "attainment_shape") read_field(j, k, c.attainment.shape);
    else if (key == "attainment_scale") read_field(j, k, c.attainment.scale);
    else if (key == "achievements_median") read_field(j, k, c.achievements_median);
    else if (key == "achievements_sigma") read_field(j, k, c.achievements_sigma);
    else if (key == "achievements_min") read_field(j, k, c.achievements_min);
    else if (key == "achievements_max") read_field(j, k, c.achievements_max);
    else if (key == "zipf_exponent") read_field(j, k, c.zipf_exponent);
    else if (key == "player_correlation") read_field(j, k, c.player_correlation);
    else if (key == "game_correlation") read_field(j, k, c.game_correlation);
    else if (key == "strategy_shape_multiplier") read_field(j, k, c.strategy_shape_multiplier);
    else if (key == "role_playing_shape_multiplier") read_field(j, k, c.role_playing_shape_multiplier);
    else if (key == "action_scale_multiplier") read_field(j, k, c.action_scale_multiplier);
    else throw DatagenError(DatagenErrc::InvalidConfig, "unknown config key '" + key + "'");
    (void)value;
  }
}

GenConfig load_config(const std::filesystem::path& file, GenConfig base) {
  std::ifstream in(file);
  if (!in) throw DatagenError(DatagenErrc::IoError, "cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_overrides(base, ss.str());
  return base;
}

ScaledCounts scaled_counts(const GenConfig& c) {
  if (!(c.scale > 0.0) || !std::isfinite(c.scale)) throw DatagenError(DatagenErrc::InvalidConfig, "scale must be positive");
  if (c.players == 0 || c.games == 0 || c.developers == 0 || c.genres == 0) {
    throw DatagenError(DatagenErrc::InvalidConfig, "vertex counts must be positive");
  }
  if (!(c.attainment.shape > 0.0) || !(c.attainment.scale > 0.0)) {
    throw DatagenError(DatagenErrc::InvalidConfig, "attainment parameters must be positive");
  }
  if (c.achievements_min == 0 || c.achievements_min > c.achievements_max || !(c.achievements_median > 0.0) ||
      !(c.achievements_sigma >= 0.0)) {
    throw DatagenError(DatagenErrc::InvalidConfig, "bad achievement count parameters");
  }
  if (!(c.player_correlation >= 0.0) || !(c.game_correlation >= 0.0) ||
      c.player_correlation + c.game_correlation > 1.0) {
    throw DatagenError(DatagenErrc::InvalidConfig, "correlations must be nonnegative and sum to at most 1");
  }
  if (!(c.zipf_exponent >= 0.0)) throw DatagenError(DatagenErrc::InvalidConfig, "zipf exponent must be nonnegative");
  ScaledCounts s;
  s.players = std::max<std::size_t>(2, scale_linear(c.players, c.scale));
  s.games = std::max<std::size_t>(1, scale_linear(c.games, c.scale));
  s.developers = std::max<std::size_t>(1, scale_linear(c.developers, c.scale));
  s.genres = std::max<std::size_t>(1, scale_linear(c.genres, c.scale));
  // A spanning tree keeps the friend network connected.
  s.friendships = std::max(s.players - 1, scale_square(c.friendships, c.scale));
  s.ownership = scale_square(c.ownership, c.scale);
  const std::size_t pairs = s.players * (s.players - 1) / 2;
  if (s.friendships > pairs) {
    throw DatagenError(DatagenErrc::InfeasibleConfig, std::to_string(s.friendships) + " friendships exceed the " +
                                                          std::to_string(pairs) + " player pairs");
  }
  if (s.ownership > s.players * s.games) {
    throw DatagenError(DatagenErrc::InfeasibleConfig,
                       std::to_string(s.ownership) + " ownership edges exceed players x games");
  }
  const std::size_t max_genres = std::min<std::size_t>(5, s.genres);
  s.genre_links = std::clamp(scale_linear(c.genre_links, c.scale), s.games, s.games * max_genres);
  s.developed = std::clamp(scale_linear(c.developed, c.scale), s.games, s.games * s.developers);
  return s;
}

PlantResult plant_targets(std::span<const double> targets, std::size_t achievements,
                          const stats::LomaxParams& target, std::uint64_t seed) {
  const std::size_t n = targets.size();
  const std::size_t N = achievements;
  PlantResult out;
  out.bits.assign(n * N, 0);
  out.ratings.assign(n, 0.0);
  if (n <= 1 || N == 0) return out;
  Rng rng(splitmix(seed));
  // Rows with a zero target never unlock anything.
  std::vector<std::size_t> active;
  for (std::size_t s = 0; s < n; ++s) {
    if (targets[s] > 0.0) active.push_back(s);
  }

  // Two bands of completion rates: a few commonly unlocked achievements give
  // resolution near zero, the rest share a rate tuned so that the rating mass
  // matches the targets. Targets above the largest reachable rating count at
  // that rating.
  constexpr double kEasyShare = 0.15;
  constexpr double kEasyLow = 0.75;
  constexpr double kEasyHigh = 0.95;
  constexpr double kSpread = 0.8;
  constexpr int kRepairPasses = 40;
  const std::size_t easy = static_cast<std::size_t>(std::llround(kEasyShare * static_cast<double>(N)));
  std::vector<double> jitter(N);
  for (auto& u : jitter) u = uniform(rng);
  const double nd = static_cast<double>(n);
  auto design = [&](double mid) {
    std::vector<std::size_t> m(N);
    for (std::size_t i = 0; i < N; ++i) {
      double c;
      if (i < easy) {
        const double q = (static_cast<double>(i) + jitter[i]) / static_cast<double>(easy);
        c = kEasyLow + (kEasyHigh - kEasyLow) * q;
      } else {
        const double q = (static_cast<double>(i - easy) + jitter[i]) / static_cast<double>(N - easy);
        c = std::min(1.0, mid * (1.0 - kSpread + 2.0 * kSpread * q));
      }
      m[i] = std::min({n - 1, active.size(), static_cast<std::size_t>(std::llround(c * nd))});
    }
    return m;
  };
  std::vector<std::size_t> m;
  double best = std::numeric_limits<double>::infinity();
  for (int g = 0; g < 200; ++g) {
    const double mid = 0.005 + 0.6 * g / 199.0;
    auto cand = design(mid);
    double cap = 0.0, reach = 0.0;
    for (const auto k : cand) {
      cap += static_cast<double>(k) * (nd - static_cast<double>(k)) / nd;
      reach += (nd - static_cast<double>(k)) / nd;
    }
    cap /= static_cast<double>(N);
    reach /= static_cast<double>(N);
    double goal = 0.0;
    for (const double t : targets) goal += std::min(t, reach);
    const double gap = std::abs(cap - goal);
    if (gap < best) {
      best = gap;
      m = std::move(cand);
    }
  }

  const double denom = nd * static_cast<double>(N);
  std::vector<double> w(N);
  for (std::size_t i = 0; i < N; ++i) w[i] = (nd - static_cast<double>(m[i])) / denom;
  std::vector<std::size_t> cols(N);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });

  // Greedy: each column goes to the rows with the most unmet target.
  std::vector<double> rem(targets.begin(), targets.end());
  std::vector<double> tie(n);
  std::vector<std::size_t> rows;
  for (const auto i : cols) {
    if (m[i] == 0) continue;
    for (auto& t : tie) t = uniform(rng);
    rows = active;
    std::nth_element(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(m[i] - 1), rows.end(),
                     [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] || (rem[a] == rem[b] && tie[a] < tie[b]); });
    for (std::size_t k = 0; k < m[i]; ++k) {
      out.bits[rows[k] * N + i] = 1;
      rem[rows[k]] -= w[i];
    }
  }

  // Repair: swap a column between an over-served holder and an under-served
  // non-holder when that brings both closer to their goals in G = F + x.
  auto G = [&](double x) { return stats::lomax_cdf(target, x) + x; };
  std::vector<double> gt(n), r(n);
  for (std::size_t s = 0; s < n; ++s) {
    gt[s] = G(targets[s]);
    r[s] = targets[s] - rem[s];
  }
  auto cost = [&](std::size_t s, double value) {
    const double d = G(value) - gt[s];
    return d * d;
  };
  std::vector<std::size_t> holders, others;
  std::vector<double> over(n);
  auto repair = [&](int passes) {
    for (int pass = 0; pass < passes; ++pass) {
      std::size_t changed = 0;
      for (const auto i : cols) {
        if (m[i] == 0 || m[i] == active.size()) continue;
        holders.clear();
        others.clear();
        for (std::size_t s = 0; s < n; ++s) {
          over[s] = G(r[s]) - gt[s];
          if (out.bits[s * N + i]) {
            holders.push_back(s);
          } else if (targets[s] > 0.0) {
            others.push_back(s);
          }
        }
        std::sort(holders.begin(), holders.end(),
                  [&](std::size_t a, std::size_t b) { return over[a] > over[b] || (over[a] == over[b] && a < b); });
        std::sort(others.begin(), others.end(),
                  [&](std::size_t a, std::size_t b) { return over[a] < over[b] || (over[a] == over[b] && a < b); });
        const std::size_t limit = std::min(holders.size(), others.size());
        for (std::size_t k = 0; k < limit; ++k) {
          const std::size_t h = holders[k];
          const std::size_t o = others[k];
          const double before = cost(h, r[h]) + cost(o, r[o]);
          const double after = cost(h, r[h] - w[i]) + cost(o, r[o] + w[i]);
          if (!(after < before - 1e-15)) break;
          out.bits[h * N + i] = 0;
          out.bits[o * N + i] = 1;
          r[h] -= w[i];
          r[o] += w[i];
          ++changed;
        }
      }
      if (changed == 0) break;
    }
  };
  repair(kRepairPasses);
  // Hand the sorted targets out again in realized order, keeping the target
  // multiset while letting rows keep their achievable rank.
  std::vector<std::size_t> by_realized(n);
  std::iota(by_realized.begin(), by_realized.end(), std::size_t{0});
  std::stable_sort(by_realized.begin(), by_realized.end(), [&](std::size_t a, std::size_t b) {
    return r[a] < r[b] || (r[a] == r[b] && targets[a] < targets[b]);
  });
  std::vector<double> sorted(targets.begin(), targets.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < n; ++k) gt[by_realized[k]] = G(sorted[k]);
  repair(kRepairPasses);

  // Ratings exactly as the engine computes them.
  for (std::size_t s = 0; s < n; ++s) {
    std::uint64_t num = 0;
    for (std::size_t i = 0; i < N; ++i) {
      if (out.bits[s * N + i]) num += n - m[i];
    }
    out.ratings[s] = static_cast<double>(num) / denom;
  }
  return out;
}

Generated generate_records(const GenConfig& config) {
  const ScaledCounts counts = scaled_counts(config);
  Generated gen;
  auto& rec = gen.records;
  gen.report.target = counts;
  const std::size_t P = counts.players, G = counts.games, D = counts.developers, R = counts.genres;

  // Players.
  Rng prng = substream(config.seed, kPlayers);
  std::vector<double> activity(P), sociability(P), player_latent(P);
  {
    std::uint64_t id = kSteamBase + 10000;
    for (std::size_t p = 0; p < P; ++p) {
      id += 1 + prng() % 31;
      PlayerRecord pr;
      pr.steamid = std::to_string(id);
      pr.name = padded("player", p, 5);
      rec.players.push_back(std::move(pr));
      activity[p] = std::lognormal_distribution<double>(0.0, 1.2)(prng);
      sociability[p] = std::lognormal_distribution<double>(0.0, 1.0)(prng);
      player_latent[p] = std::normal_distribution<double>(0.0, 1.0)(prng);
    }
  }

  // Genres, by descending popularity.
  for (std::size_t r = 0; r < R; ++r) {
    GenreRecord gr;
    gr.description = r < kGenreNames.size() ? std::string(kGenreNames[r]) : padded("Genre ", r + 1, 2);
    rec.genres.push_back(std::move(gr));
  }

  // Developers.
  for (std::size_t d = 0; d < D; ++d) rec.developers.push_back(DeveloperRecord{padded("Studio ", d + 1, 4), "{}"});

  // Games: names, prices, achievements, genres.
  Rng grng = substream(config.seed, kGames);
  std::vector<double> game_latent(G);
  std::discrete_distribution<std::size_t> price_dist(kPriceWeights.begin(), kPriceWeights.end());
  std::lognormal_distribution<double> ach_dist(std::log(config.achievements_median), config.achievements_sigma);
  std::vector<std::size_t> n_ach(G);
  for (std::size_t g = 0; g < G; ++g) {
    GameRecord gr;
    gr.appid = static_cast<std::int64_t>(10 * (g + 1));
    gr.name = padded("Game ", g + 1, 5);
    gr.cost = kPrices[price_dist(grng)];
    const double a = std::round(ach_dist(grng));
    n_ach[g] = std::clamp(static_cast<std::size_t>(std::max(a, 0.0)), config.achievements_min, config.achievements_max);
    for (std::size_t i = 0; i < n_ach[g]; ++i) gr.achievement_names.push_back(padded("ACH_", i + 1, 3));
    game_latent[g] = std::normal_distribution<double>(0.0, 1.0)(grng);
    rec.games.push_back(std::move(gr));
  }
  {
    Rng rrng = substream(config.seed, kGenres);
    const std::size_t max_k = std::min<std::size_t>(5, R);
    const double p = std::clamp((static_cast<double>(counts.genre_links) / static_cast<double>(G) - 1.0) /
                                    static_cast<double>(std::max<std::size_t>(1, max_k - 1)),
                                0.0, 1.0);
    std::vector<std::size_t> k(G);
    std::binomial_distribution<std::size_t> extra(max_k - 1, p);
    std::size_t total = 0;
    for (auto& kg : k) total += kg = 1 + extra(rrng);
    std::uniform_int_distribution<std::size_t> pick(0, G - 1);
    while (total < counts.genre_links) {
      auto& kg = k[pick(rrng)];
      if (kg < max_k) ++kg, ++total;
    }
    while (total > counts.genre_links) {
      auto& kg = k[pick(rrng)];
      if (kg > 1) --kg, --total;
    }
    std::vector<double> popularity(R);
    for (std::size_t r = 0; r < R; ++r) popularity[r] = 1.0 / static_cast<double>(r + 1);
    for (std::size_t g = 0; g < G; ++g) {
      // Exponential keys give a weighted order; the first genre is primary.
      std::vector<std::pair<double, std::size_t>> keys(R);
      for (std::size_t r = 0; r < R; ++r) keys[r] = {std::log(1.0 - uniform(rrng)) / popularity[r], r};
      std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k[g]), keys.end(),
                        [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
      for (std::size_t j = 0; j < k[g]; ++j) rec.games[g].genres.push_back(rec.genres[keys[j].second].description);
    }
  }

  // Developers: every studio gets one game, the rest attach preferentially;
  // co-developer links fill up the edge count.
  {
    Rng drng = substream(config.seed, kDevelopers);
    std::vector<std::size_t> order(G);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), drng);
    WeightedSampler studios(D);
    std::vector<std::vector<std::size_t>> devs_of(G);
    std::unordered_set<std::uint64_t> linked;
    auto link = [&](std::size_t g, std::size_t d) {
      devs_of[g].push_back(d);
      linked.insert((static_cast<std::uint64_t>(g) << 32) | d);
      studios.set(d, studios.weight(d) + 1.0);
    };
    for (std::size_t j = 0; j < G; ++j) {
      const std::size_t g = order[j];
      link(g, j < D ? j : studios.sample(drng));
    }
    std::uniform_int_distribution<std::size_t> any_game(0, G - 1), any_dev(0, D - 1);
    std::size_t links = G;
    std::size_t misses = 0;
    while (links < counts.developed) {
      const std::size_t g = any_game(drng);
      const std::size_t d = misses > 64 ? any_dev(drng) : studios.sample(drng);
      if (linked.contains((static_cast<std::uint64_t>(g) << 32) | d)) {
        ++misses;
        continue;
      }
      misses = 0;
      link(g, d);
      ++links;
    }
    for (std::size_t g = 0; g < G; ++g) {
      for (const auto d : devs_of[g]) rec.games[g].developers.push_back(rec.developers[d].name);
    }
  }

  // Friendships: a preferential spanning tree, then weighted top-up.
  {
    Rng frng = substream(config.seed, kFriends);
    std::vector<std::size_t> order(P);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), frng);
    WeightedSampler joined(P);
    std::unordered_set<std::uint64_t> edges;
    edges.reserve(counts.friendships * 2);
    std::vector<std::pair<std::size_t, std::size_t>> list;
    joined.set(order[0], sociability[order[0]]);
    for (std::size_t j = 1; j < P; ++j) {
      const std::size_t a = order[j];
      const std::size_t b = joined.sample(frng);
      edges.insert(pair_key(a, b));
      list.emplace_back(a, b);
      joined.set(a, sociability[a]);
    }
    std::size_t misses = 0;
    std::uniform_int_distribution<std::size_t> any(0, P - 1);
    while (list.size() < counts.friendships) {
      const bool fallback = misses > 1000;
      const std::size_t a = fallback ? any(frng) : joined.sample(frng);
      const std::size_t b = fallback ? any(frng) : joined.sample(frng);
      if (a == b || !edges.insert(pair_key(a, b)).second) {
        ++misses;
        continue;
      }
      misses = 0;
      list.emplace_back(a, b);
    }
    std::sort(list.begin(), list.end(), [](const auto& x, const auto& y) {
      return std::minmax(x.first, x.second) < std::minmax(y.first, y.second);
    });
    for (const auto& [a, b] : list) {
      const auto& sa = rec.players[a].steamid;
      const auto& sb = rec.players[b].steamid;
      rec.friendships.push_back(sa < sb ? FriendshipRecord{sa, sb, "{}"} : FriendshipRecord{sb, sa, "{}"});
    }
    UnionFind uf(P);
    for (const auto& [a, b] : list) uf.unite(a, b);
    std::vector<std::size_t> size(P, 0);
    for (std::size_t p = 0; p < P; ++p) ++size[uf.find(p)];
    gen.report.giant_component =
        static_cast<double>(*std::max_element(size.begin(), size.end())) / static_cast<double>(P);
  }

  // Ownership: rank-power-law popularity over a shuffled game order, owners
  // drawn by activity.
  std::vector<std::vector<std::size_t>> owners(G);
  {
    Rng orng = substream(config.seed, kOwnership);
    std::vector<std::size_t> rank(G);
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::shuffle(rank.begin(), rank.end(), orng);
    std::vector<double> weight(G);
    for (std::size_t g = 0; g < G; ++g) weight[g] = std::pow(static_cast<double>(rank[g] + 1), -config.zipf_exponent);
    std::vector<std::size_t> count;
    if (counts.ownership >= G) {
      count = capped_allocation(weight, counts.ownership - G, P - 1);
      for (auto& c : count) ++c;
    } else {
      count = capped_allocation(weight, counts.ownership, P);
    }
    for (std::size_t g = 0; g < G; ++g) owners[g] = weighted_subset(activity, count[g], orng);
    std::vector<std::size_t> sorted = count;
    std::sort(sorted.rbegin(), sorted.rend());
    const std::size_t top = std::max<std::size_t>(1, G / 10);
    const std::size_t top_sum = std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(top), std::size_t{0});
    gen.report.top_decile_share = counts.ownership ? static_cast<double>(top_sum) / static_cast<double>(counts.ownership) : 0.0;
  }

  // Engagement targets and unlock matrices.
  const double wp = std::sqrt(config.player_correlation);
  const double wg = std::sqrt(config.game_correlation);
  const double we = std::sqrt(std::max(0.0, 1.0 - config.player_correlation - config.game_correlation));
  std::vector<std::vector<std::size_t>> player_games(P);
  std::vector<std::vector<std::vector<std::uint8_t>>> rows_of(G);
  std::vector<double> realized;
  for (std::size_t g = 0; g < G; ++g) {
    Rng erng = substream(config.seed, kEngagement, g);
    stats::LomaxParams params = config.attainment;
    const auto& primary = rec.games[g].genres.front();
    if (primary == "Strategy") params.shape *= config.strategy_shape_multiplier;
    if (primary == "Role-Playing") params.shape *= config.role_playing_shape_multiplier;
    if (primary == "Action") params.scale *= config.action_scale_multiplier;
    const std::size_t n = owners[g].size();
    const double bound = n > 0 ? 1.0 - 1.0 / static_cast<double>(n) : 0.0;
    std::vector<double> targets(n);
    std::normal_distribution<double> eps(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double base = wp * player_latent[owners[g][k]] + wg * game_latent[g];
      double e = bound;
      for (int attempt = 0; attempt < 64; ++attempt) {
        const double x = stats::lomax_quantile(params, normal_cdf(base + we * eps(erng)));
        if (x <= bound) {
          e = x;
          break;
        }
      }
      targets[k] = e;
    }
    const PlantResult plant = plant_targets(targets, n_ach[g], config.attainment, splitmix(config.seed + kPlant) ^ g);
    rows_of[g].resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      rows_of[g][k].assign(plant.bits.begin() + static_cast<std::ptrdiff_t>(k * n_ach[g]),
                           plant.bits.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_ach[g]));
      player_games[owners[g][k]].push_back(g);
    }
    realized.insert(realized.end(), plant.ratings.begin(), plant.ratings.end());
  }

  // Ownership and achievement records, by player then game.
  Rng trng = substream(config.seed, kOwnership, 1);
  std::lognormal_distribution<double> playtime(5.0, 1.5);
  for (std::size_t p = 0; p < P; ++p) {
    for (const auto g : player_games[p]) {
      OwnershipRecord o;
      o.steamid = rec.players[p].steamid;
      o.appid = rec.games[g].appid;
      o.playtime_minutes = static_cast<std::int64_t>(std::floor(playtime(trng)));
      rec.ownership.push_back(std::move(o));
      const auto& own = owners[g];
      const std::size_t k = static_cast<std::size_t>(std::lower_bound(own.begin(), own.end(), p) - own.begin());
      rec.achievements.push_back(AchievementRecord{rec.players[p].steamid, rec.games[g].appid, std::move(rows_of[g][k])});
    }
  }

  auto& rp = gen.report;
  rp.realized.players = rec.players.size();
  rp.realized.games = rec.games.size();
  rp.realized.developers = rec.developers.size();
  rp.realized.genres = rec.genres.size();
  rp.realized.friendships = rec.friendships.size();
  rp.realized.ownership = rec.ownership.size();
  for (const auto& g : rec.games) {
    rp.realized.developed += g.developers.size();
    rp.realized.genre_links += g.genres.size();
  }
  rp.rated_pairs = realized.size();
  rp.attainment_ks = realized.empty() ? 0.0 : stats::ks_statistic(realized, config.attainment);
  return gen;
}

GenReport generate(const GenConfig& config, const std::filesystem::path& out) {
  Generated gen = generate_records(config);
  try {
    write_records(gen.records, out);
  } catch (const DatasetError& e) {
    throw DatagenError(DatagenErrc::IoError, e.what());
  }
  return gen.report;
}

void write_report(std::ostream& out, const GenReport& r) {
  out << "kind\ttarget\trealized\n";
  out << "players\t" << r.target.players << '\t' << r.realized.players << '\n';
  out << "games\t" << r.target.games << '\t' << r.realized.games << '\n';
  out << "developers\t" << r.target.developers << '\t' << r.realized.developers << '\n';
  out << "genres\t" << r.target.genres << '\t' << r.realized.genres << '\n';
  out << "friendships\t" << r.target.friendships << '\t' << r.realized.friendships << '\n';
  out << "ownership\t" << r.target.ownership << '\t' << r.realized.ownership << '\n';
  out << "developed\t" << r.target.developed << '\t' << r.realized.developed << '\n';
  out << "genre_links\t" << r.target.genre_links << '\t' << r.realized.genre_links << '\n';
  out << "attainment_ks\t" << format_real(r.attainment_ks, 6) << '\n';
  out << "rated_pairs\t" << r.rated_pairs << '\n';
  out << "giant_component\t" << format_real(r.giant_component, 6) << '\n';
  out << "top_decile_share\t" << format_real(r.top_decile_share, 6) << '\n';
}

PlantedRatings planted_ratings(const PlantedConfig& c) {
  if (c.users == 0 || c.items == 0 || c.rank == 0 || !(c.density > 0.0 && c.density <= 1.0)) {
    throw DatagenError(DatagenErrc::InvalidConfig, "planted dataset needs positive sizes and density in (0,1]");
  }
  Rng rng(splitmix(c.seed));
  std::normal_distribution<double> unit(0.0, 1.0);
  const double factor_std = std::sqrt(c.interaction_std / std::sqrt(static_cast<double>(c.rank)));
  std::vector<double> bu(c.users), bi(c.items), U(c.users * c.rank), V(c.items * c.rank);
  for (auto& x : bu) x = c.bias_std * unit(rng);
  for (auto& x : bi) x = c.bias_std * unit(rng);
  for (auto& x : U) x = factor_std * unit(rng);
  for (auto& x : V) x = factor_std * unit(rng);
  PlantedRatings out;
  out.users = c.users;
  out.items = c.items;
  out.truth.resize(c.users * c.items);
  for (std::size_t u = 0; u < c.users; ++u) {
    for (std::size_t i = 0; i < c.items; ++i) {
      double v = c.mean + bu[u] + bi[i];
      for (std::size_t k = 0; k < c.rank; ++k) v += U[u * c.rank + k] * V[i * c.rank + k];
      out.truth[u * c.items + i] = std::clamp(v, 0.0, 1.0);
    }
  }
  const auto total = static_cast<std::size_t>(std::llround(c.density * static_cast<double>(c.users * c.items)));
  std::vector<std::size_t> cells(c.users * c.items);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  std::shuffle(cells.begin(), cells.end(), rng);
  cells.resize(std::max<std::size_t>(1, total));
  std::sort(cells.begin(), cells.end());
  for (std::size_t u = 0; u < c.users; ++u) out.table.user_index(std::to_string(u));
  for (std::size_t i = 0; i < c.items; ++i) out.table.item_index(static_cast<std::int64_t>(i));
  for (const auto cell : cells) {
    const double r = std::clamp(out.truth[cell] + c.noise_std * unit(rng), 0.0, 1.0);
    out.table.add(static_cast<std::uint32_t>(cell / c.items), static_cast<std::uint32_t>(cell % c.items), r);
  }
  return out;
}

}  // namespace achgraph::datagen
