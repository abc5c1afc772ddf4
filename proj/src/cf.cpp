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

#include "achgraph/cf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "achgraph/attainment.hpp"
#include "achgraph/stats.hpp"

namespace achgraph::cf {

namespace {

std::uint64_t pair_key(std::uint32_t u, std::uint32_t i) { return (static_cast<std::uint64_t>(u) << 32) | i; }

void check_params(const TrainParams& params) {
  if (params.factors == 0) throw CfError(CfErrc::InvalidParams, "factors must be positive");
  if (!(params.learning_rate > 0.0) || !std::isfinite(params.learning_rate)) {
    throw CfError(CfErrc::InvalidParams, "learning rate must be positive");
  }
  if (!(params.regularization >= 0.0) || !std::isfinite(params.regularization)) {
    throw CfError(CfErrc::InvalidParams, "regularization must be nonnegative");
  }
  if (!(params.init_std >= 0.0) || !std::isfinite(params.init_std)) {
    throw CfError(CfErrc::InvalidParams, "init noise must be nonnegative");
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// p_u + |N(u)|^(-1/2) sum y_j, written into z.
void user_vector(const SvdppModel& m, std::uint32_t u, std::vector<double>& z) {
  const std::size_t f = m.factors;
  z.assign(m.p.begin() + u * f, m.p.begin() + (u + 1) * f);
  const auto rated = m.rated_by(u);
  if (rated.empty()) return;
  const double norm = 1.0 / std::sqrt(static_cast<double>(rated.size()));
  std::vector<double> sum(f, 0.0);
  for (const auto j : rated) {
    const double* yj = m.y.data() + j * f;
    for (std::size_t k = 0; k < f; ++k) sum[k] += yj[k];
  }
  for (std::size_t k = 0; k < f; ++k) z[k] += sum[k] * norm;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void check_triples(std::span<const Triple> data, std::size_t n_users, std::size_t n_items) {
  for (const auto& t : data) {
    if (t.user >= n_users || t.item >= n_items) throw CfError(CfErrc::InvalidParams, "triple index out of range");
    if (!std::isfinite(t.rating)) throw CfError(CfErrc::InvalidParams, "rating is not finite");
  }
}

void run_per_rating(SvdppModel& m, std::span<const Triple> data, const TrainParams& params, std::mt19937_64& rng) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (const auto idx : order) sgd_step(m, data[idx], params.learning_rate, params.regularization);
  }
}

void run_per_user(SvdppModel& m, std::span<const Triple> data, const TrainParams& params, std::mt19937_64& rng) {
  const std::size_t f = m.factors;
  const double lr = params.learning_rate;
  const double reg = params.regularization;
  std::vector<std::vector<std::size_t>> by_user(m.n_users);
  for (std::size_t idx = 0; idx < data.size(); ++idx) by_user[data[idx].user].push_back(idx);
  std::vector<std::uint32_t> users;
  for (std::uint32_t u = 0; u < m.n_users; ++u) {
    if (!by_user[u].empty()) users.push_back(u);
  }
  std::vector<double> z(f), acc(f);
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(users.begin(), users.end(), rng);
    for (const auto u : users) {
      auto& rows = by_user[u];
      std::shuffle(rows.begin(), rows.end(), rng);
      const auto rated = m.rated_by(u);
      const double norm = rated.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(rated.size()));
      std::vector<double> implicit(f, 0.0);
      for (const auto j : rated) {
        const double* yj = m.y.data() + j * f;
        for (std::size_t k = 0; k < f; ++k) implicit[k] += yj[k];
      }
      for (std::size_t k = 0; k < f; ++k) implicit[k] *= norm;
      std::fill(acc.begin(), acc.end(), 0.0);
      double* pu = m.p.data() + u * f;
      for (const auto idx : rows) {
        const Triple& t = data[idx];
        double* qi = m.q.data() + t.item * f;
        for (std::size_t k = 0; k < f; ++k) z[k] = pu[k] + implicit[k];
        const double err = t.rating - (m.mu + m.bu[u] + m.bi[t.item] + dot(qi, z.data(), f));
        m.bu[u] += lr * (err - reg * m.bu[u]);
        m.bi[t.item] += lr * (err - reg * m.bi[t.item]);
        for (std::size_t k = 0; k < f; ++k) {
          const double puk = pu[k];
          const double qik = qi[k];
          acc[k] += err * qik * norm;
          pu[k] += lr * (err * qik - reg * puk);
          qi[k] += lr * (err * z[k] - reg * qik);
        }
      }
      // Each of the user's steps also shrinks y_j once.
      const double shrink = reg * static_cast<double>(rows.size());
      for (const auto j : rated) {
        double* yj = m.y.data() + j * f;
        for (std::size_t k = 0; k < f; ++k) yj[k] += lr * (acc[k] - shrink * yj[k]);
      }
    }
  }
}

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void put_vec(std::ostream& out, const std::vector<T>& v) {
  put<std::uint64_t>(out, v.size());
  if (!v.empty()) out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw CfError(CfErrc::ModelFormat, "truncated model file");
  return v;
}

template <typename T>
std::vector<T> get_vec(std::istream& in, std::uint64_t expected) {
  const auto n = get<std::uint64_t>(in);
  if (n != expected) throw CfError(CfErrc::ModelFormat, "array length mismatch in model file");
  std::vector<T> v(n);
  if (n > 0 && !in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)))) {
    throw CfError(CfErrc::ModelFormat, "truncated model file");
  }
  return v;
}

constexpr char kMagic[8] = {'A', 'C', 'H', 'S', 'V', 'D', 'P', 'P'};
constexpr std::uint32_t kModelVersion = 1;

}  // namespace

std::uint32_t RatingsTable::user_index(std::string_view steamid) {
  const std::string key(steamid);
  if (auto it = user_ids_.find(key); it != user_ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(users_.size());
  users_.push_back(key);
  user_ids_.emplace(key, id);
  return id;
}

std::uint32_t RatingsTable::item_index(std::int64_t appid) {
  if (auto it = item_ids_.find(appid); it != item_ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(items_.size());
  items_.push_back(appid);
  item_ids_.emplace(appid, id);
  return id;
}

std::optional<std::uint32_t> RatingsTable::find_user(std::string_view steamid) const {
  if (auto it = user_ids_.find(std::string(steamid)); it != user_ids_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::uint32_t> RatingsTable::find_item(std::int64_t appid) const {
  if (auto it = item_ids_.find(appid); it != item_ids_.end()) return it->second;
  return std::nullopt;
}

void RatingsTable::add(std::string_view steamid, std::int64_t appid, double rating) {
  add(user_index(steamid), item_index(appid), rating);
}

void RatingsTable::add(std::uint32_t user, std::uint32_t item, double rating) {
  while (users_.size() <= user) user_index(std::to_string(users_.size()));
  while (items_.size() <= item) item_index(static_cast<std::int64_t>(items_.size()));
  if (!std::isfinite(rating)) throw CfError(CfErrc::InvalidParams, "rating is not finite");
  if (!pairs_.emplace(pair_key(user, item), triples_.size()).second) {
    throw CfError(CfErrc::DuplicateRating,
                  "duplicate rating for user " + users_[user] + ", item " + std::to_string(items_[item]));
  }
  triples_.push_back(Triple{user, item, rating});
}

RatingsTable ratings_from_graph(const PropertyGraph& graph) {
  RatingsTable table;
  for (const auto p : graph.vertices_of(VertexKind::Player)) table.user_index(render(graph.vertex(p).attrs.at("steamid")));
  std::unordered_map<std::uint32_t, std::uint32_t> game_item;
  for (const auto g : graph.vertices_of(VertexKind::Game)) {
    const auto& attrs = graph.vertex(g).attrs;
    const auto it = attrs.find("appid");
    const auto* appid = it == attrs.end() ? nullptr : std::get_if<std::int64_t>(&it->second);
    game_item.emplace(g.value, table.item_index(appid ? *appid : static_cast<std::int64_t>(g.value)));
  }
  for (const auto& e : graph.edges()) {
    if (e.kind != EdgeKind::Owns) continue;
    const auto it = e.attrs.find(kAttainmentAttr);
    if (it == e.attrs.end()) continue;
    const auto rating = as_real(it->second);
    if (!rating) continue;
    const auto user = *table.find_user(render(graph.vertex(e.src).attrs.at("steamid")));
    table.add(user, game_item.at(e.dst.value), *rating);
  }
  return table;
}

std::optional<std::uint32_t> SvdppModel::find_user(std::string_view steamid) const {
  const auto it = std::find(user_keys.begin(), user_keys.end(), steamid);
  if (it == user_keys.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - user_keys.begin());
}

std::optional<std::uint32_t> SvdppModel::find_item(std::int64_t appid) const {
  const auto it = std::find(item_keys.begin(), item_keys.end(), appid);
  if (it == item_keys.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - item_keys.begin());
}

SvdppModel init_model(std::span<const Triple> data, std::size_t n_users, std::size_t n_items,
                      const TrainParams& params) {
  check_params(params);
  if (data.empty()) throw CfError(CfErrc::EmptyData, "no ratings to train on");
  check_triples(data, n_users, n_items);
  SvdppModel m;
  m.factors = params.factors;
  m.n_users = n_users;
  m.n_items = n_items;
  m.seed = params.seed;
  double sum = 0.0;
  for (const auto& t : data) sum += t.rating;
  m.mu = sum / static_cast<double>(data.size());
  m.bu.assign(n_users, 0.0);
  m.bi.assign(n_items, 0.0);

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> noise(0.0, params.init_std);
  auto draw = [&](std::vector<double>& v, std::size_t rows) {
    v.resize(rows * params.factors);
    for (auto& x : v) x = params.init_std > 0.0 ? noise(rng) : 0.0;
  };
  draw(m.p, n_users);
  draw(m.q, n_items);
  draw(m.y, n_items);

  std::vector<std::vector<std::uint32_t>> rated(n_users);
  for (const auto& t : data) rated[t.user].push_back(t.item);
  m.offsets.assign(n_users + 1, 0);
  for (std::size_t u = 0; u < n_users; ++u) {
    auto& items = rated[u];
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    m.offsets[u + 1] = m.offsets[u] + items.size();
    m.implicit.insert(m.implicit.end(), items.begin(), items.end());
  }
  return m;
}

SvdppModel train(std::span<const Triple> data, std::size_t n_users, std::size_t n_items, const TrainParams& params) {
  SvdppModel m = init_model(data, n_users, n_items, params);
  // Init consumed a fresh stream; the epoch order uses its own.
  std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
  if (params.schedule == Schedule::PerRating) {
    run_per_rating(m, data, params, rng);
  } else {
    run_per_user(m, data, params, rng);
  }
  return m;
}

SvdppModel train(const RatingsTable& data, const TrainParams& params) {
  SvdppModel m = train(data.triples(), data.n_users(), data.n_items(), params);
  m.user_keys = data.users();
  m.item_keys = data.items();
  return m;
}

double predict_raw(const SvdppModel& m, std::uint32_t user, std::uint32_t item) {
  std::vector<double> z;
  user_vector(m, user, z);
  return m.mu + m.bu[user] + m.bi[item] + dot(m.q.data() + item * m.factors, z.data(), m.factors);
}

double predict(const SvdppModel& m, std::optional<std::uint32_t> user, std::optional<std::uint32_t> item) {
  const bool known_user = user && *user < m.n_users;
  const bool known_item = item && *item < m.n_items;
  if (known_user && known_item) return clamp01(predict_raw(m, *user, *item));
  double est = m.mu;
  if (known_user) est += m.bu[*user];
  if (known_item) est += m.bi[*item];
  return clamp01(est);
}

double predict(const SvdppModel& m, std::uint32_t user, std::uint32_t item) {
  return predict(m, std::optional<std::uint32_t>(user), std::optional<std::uint32_t>(item));
}

double training_mse(const SvdppModel& m, std::span<const Triple> data) {
  if (data.empty()) throw CfError(CfErrc::EmptyData, "no ratings");
  double s = 0.0;
  for (const auto& t : data) {
    const double d = predict(m, t.user, t.item) - t.rating;
    s += d * d;
  }
  return s / static_cast<double>(data.size());
}

double example_loss(const SvdppModel& m, const Triple& t, double reg) {
  const std::size_t f = m.factors;
  const double err = t.rating - predict_raw(m, t.user, t.item);
  double norm = m.bu[t.user] * m.bu[t.user] + m.bi[t.item] * m.bi[t.item];
  norm += dot(m.p.data() + t.user * f, m.p.data() + t.user * f, f);
  norm += dot(m.q.data() + t.item * f, m.q.data() + t.item * f, f);
  for (const auto j : m.rated_by(t.user)) norm += dot(m.y.data() + j * f, m.y.data() + j * f, f);
  return 0.5 * err * err + 0.5 * reg * norm;
}

Gradient example_gradient(const SvdppModel& m, const Triple& t, double reg) {
  const std::size_t f = m.factors;
  std::vector<double> z;
  user_vector(m, t.user, z);
  const double* pu = m.p.data() + t.user * f;
  const double* qi = m.q.data() + t.item * f;
  const double err = t.rating - (m.mu + m.bu[t.user] + m.bi[t.item] + dot(qi, z.data(), f));
  const auto rated = m.rated_by(t.user);
  const double norm = rated.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(rated.size()));
  Gradient g;
  g.bu = -err + reg * m.bu[t.user];
  g.bi = -err + reg * m.bi[t.item];
  g.pu.resize(f);
  g.qi.resize(f);
  for (std::size_t k = 0; k < f; ++k) {
    g.pu[k] = -err * qi[k] + reg * pu[k];
    g.qi[k] = -err * z[k] + reg * qi[k];
  }
  for (const auto j : rated) {
    const double* yj = m.y.data() + j * f;
    auto& block = g.y.emplace_back(f);
    for (std::size_t k = 0; k < f; ++k) block[k] = -err * qi[k] * norm + reg * yj[k];
  }
  return g;
}

void sgd_step(SvdppModel& m, const Triple& t, double lr, double reg) {
  const std::size_t f = m.factors;
  std::vector<double> z;
  user_vector(m, t.user, z);
  double* pu = m.p.data() + t.user * f;
  double* qi = m.q.data() + t.item * f;
  const double err = t.rating - (m.mu + m.bu[t.user] + m.bi[t.item] + dot(qi, z.data(), f));
  const auto rated = m.rated_by(t.user);
  const double norm = rated.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(rated.size()));
  m.bu[t.user] += lr * (err - reg * m.bu[t.user]);
  m.bi[t.item] += lr * (err - reg * m.bi[t.item]);
  for (const auto j : rated) {
    double* yj = m.y.data() + j * f;
    for (std::size_t k = 0; k < f; ++k) yj[k] += lr * (err * qi[k] * norm - reg * yj[k]);
  }
  for (std::size_t k = 0; k < f; ++k) {
    const double puk = pu[k];
    const double qik = qi[k];
    pu[k] += lr * (err * qik - reg * puk);
    qi[k] += lr * (err * z[k] - reg * qik);
  }
}

void save_model(const SvdppModel& m, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw CfError(CfErrc::IoError, "cannot write " + file.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kModelVersion);
  put<std::uint64_t>(out, m.factors);
  put<std::uint64_t>(out, m.n_users);
  put<std::uint64_t>(out, m.n_items);
  put<double>(out, m.mu);
  put<std::uint64_t>(out, m.seed);
  put_vec(out, m.bu);
  put_vec(out, m.bi);
  put_vec(out, m.p);
  put_vec(out, m.q);
  put_vec(out, m.y);
  put_vec(out, m.offsets);
  put_vec(out, m.implicit);
  put<std::uint64_t>(out, m.user_keys.size());
  for (const auto& key : m.user_keys) {
    put<std::uint64_t>(out, key.size());
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
  }
  put_vec(out, m.item_keys);
  if (!out) throw CfError(CfErrc::IoError, "write failed for " + file.string());
}

SvdppModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CfError(CfErrc::IoError, "cannot read " + file.string());
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw CfError(CfErrc::ModelFormat, file.string() + " is not a model file");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kModelVersion) {
    throw CfError(CfErrc::ModelFormat, "unsupported model version " + std::to_string(version));
  }
  SvdppModel m;
  m.factors = get<std::uint64_t>(in);
  m.n_users = get<std::uint64_t>(in);
  m.n_items = get<std::uint64_t>(in);
  m.mu = get<double>(in);
  m.seed = get<std::uint64_t>(in);
  m.bu = get_vec<double>(in, m.n_users);
  m.bi = get_vec<double>(in, m.n_items);
  m.p = get_vec<double>(in, m.n_users * m.factors);
  m.q = get_vec<double>(in, m.n_items * m.factors);
  m.y = get_vec<double>(in, m.n_items * m.factors);
  m.offsets = get_vec<std::uint64_t>(in, m.n_users + 1);
  m.implicit = get_vec<std::uint32_t>(in, m.offsets.back());
  const auto n_keys = get<std::uint64_t>(in);
  if (n_keys != 0 && n_keys != m.n_users) throw CfError(CfErrc::ModelFormat, "user key count mismatch");
  for (std::uint64_t i = 0; i < n_keys; ++i) {
    const auto len = get<std::uint64_t>(in);
    if (len > (1u << 20)) throw CfError(CfErrc::ModelFormat, "user key too long");
    std::string key(len, '\0');
    if (len > 0 && !in.read(key.data(), static_cast<std::streamsize>(len))) {
      throw CfError(CfErrc::ModelFormat, "truncated model file");
    }
    m.user_keys.push_back(std::move(key));
  }
  const auto n_items = get<std::uint64_t>(in);
  if (n_items != 0 && n_items != m.n_items) throw CfError(CfErrc::ModelFormat, "item key count mismatch");
  m.item_keys.resize(n_items);
  if (n_items > 0 &&
      !in.read(reinterpret_cast<char*>(m.item_keys.data()), static_cast<std::streamsize>(n_items * sizeof(std::int64_t)))) {
    throw CfError(CfErrc::ModelFormat, "truncated model file");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw CfError(CfErrc::ModelFormat, "trailing bytes in model file");
  for (std::size_t u = 0; u < m.n_users; ++u) {
    if (m.offsets[u] > m.offsets[u + 1]) throw CfError(CfErrc::ModelFormat, "bad implicit offsets");
  }
  for (const auto j : m.implicit) {
    if (j >= m.n_items) throw CfError(CfErrc::ModelFormat, "implicit item out of range");
  }
  return m;
}

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw CfError(CfErrc::TooFewRatings, "cross-validation needs k >= 2");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos % k;
  return fold;
}

std::vector<FoldMetrics> cross_validate(std::span<const Triple> data, std::size_t n_users, std::size_t n_items,
                                        const TrainParams& params, std::size_t k) {
  if (k < 2) throw CfError(CfErrc::TooFewRatings, "cross-validation needs k >= 2");
  if (data.size() < k) {
    throw CfError(CfErrc::TooFewRatings,
                  std::to_string(data.size()) + " ratings cannot fill " + std::to_string(k) + " folds");
  }
  const auto fold = fold_assignment(data.size(), k, params.seed);
  std::vector<FoldMetrics> out;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<Triple> train_set, test_set;
    for (std::size_t i = 0; i < data.size(); ++i) (fold[i] == f ? test_set : train_set).push_back(data[i]);
    const SvdppModel m = train(train_set, n_users, n_items, params);
    std::vector<double> pred, truth, base;
    for (const auto& t : test_set) {
      pred.push_back(predict(m, t.user, t.item));
      truth.push_back(t.rating);
      base.push_back(clamp01(m.mu));
    }
    FoldMetrics fm;
    fm.fold = f;
    fm.n_train = train_set.size();
    fm.n_test = test_set.size();
    fm.rmse = stats::rmse(pred, truth);
    fm.mae = stats::mae(pred, truth);
    fm.baseline_rmse = stats::rmse(base, truth);
    fm.baseline_mae = stats::mae(base, truth);
    out.push_back(fm);
  }
  return out;
}

std::vector<FoldMetrics> cross_validate(const RatingsTable& data, const TrainParams& params, std::size_t k) {
  return cross_validate(data.triples(), data.n_users(), data.n_items(), params, k);
}

std::vector<Recommendation> recommend_top_n(const SvdppModel& model, std::uint32_t user,
                                            std::span<const std::uint32_t> candidates, std::size_t n,
                                            bool exclude_rated) {
  std::vector<std::uint32_t> items(candidates.begin(), candidates.end());
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  if (exclude_rated && user < model.n_users) {
    const auto rated = model.rated_by(user);
    std::erase_if(items, [&](std::uint32_t i) { return std::binary_search(rated.begin(), rated.end(), i); });
  }
  std::vector<Recommendation> recs;
  recs.reserve(items.size());
  for (const auto i : items) recs.push_back({i, predict(model, user, i)});
  std::stable_sort(recs.begin(), recs.end(),
                   [](const Recommendation& a, const Recommendation& b) { return a.score > b.score; });
  if (recs.size() > n) recs.resize(n);
  return recs;
}

}  // namespace achgraph::cf
