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


#include "achgraph/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include <json.hpp>

#include "achgraph/attainment.hpp"

namespace achgraph::stats {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw StatsError(StatsErrc::LengthMismatch, "prediction and truth lengths differ (" + std::to_string(pred.size()) +
                                                    " vs " + std::to_string(truth.size()) + ")");
  }
  if (pred.empty()) throw StatsError(StatsErrc::Empty, "no values");
}

double sum_log1p(double scale, std::span<const double> sample) {
  double s = 0.0;
  for (const double x : sample) s += std::log1p(x / scale);
  return s;
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(s / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
  return s / static_cast<double>(pred.size());
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 10; ++i) t.push_back(i * 0.05);
  return t;
}

std::vector<PrPoint> precision_recall_at_n(const cf::SvdppModel& model, std::span<const cf::Triple> test,
                                           std::size_t n, std::span<const double> thresholds) {
  if (n == 0) throw StatsError(StatsErrc::InvalidArgument, "n must be at least 1");
  for (const double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw StatsError(StatsErrc::InvalidArgument, "threshold outside [0,1]");
  }
  struct Scored {
    std::uint32_t item;
    double pred;
    double truth;
  };
  std::map<std::uint32_t, std::vector<Scored>> by_user;
  for (const auto& t : test) by_user[t.user].push_back({t.item, cf::predict(model, t.user, t.item), t.rating});
  for (auto& [user, items] : by_user) {
    std::sort(items.begin(), items.end(), [](const Scored& a, const Scored& b) {
      if (a.pred != b.pred) return a.pred > b.pred;
      return a.item < b.item;
    });
  }
  std::vector<PrPoint> out;
  for (const double t : thresholds) {
    PrPoint pt;
    pt.threshold = t;
    pt.n = n;
    double psum = 0.0, rsum = 0.0;
    for (const auto& [user, items] : by_user) {
      std::size_t rec = 0, hit = 0, rel = 0;
      for (std::size_t k = 0; k < items.size(); ++k) {
        const bool relevant = items[k].truth >= t;
        rel += relevant;
        if (k < n && items[k].pred >= t) {
          ++rec;
          hit += relevant;
        }
      }
      if (rec > 0) {
        psum += static_cast<double>(hit) / static_cast<double>(rec);
        ++pt.users_precision;
      }
      if (rel > 0) {
        rsum += static_cast<double>(hit) / static_cast<double>(rel);
        ++pt.users_recall;
      }
    }
    pt.precision = pt.users_precision ? psum / static_cast<double>(pt.users_precision) : 0.0;
    pt.recall = pt.users_recall ? rsum / static_cast<double>(pt.users_recall) : 0.0;
    out.push_back(pt);
  }
  return out;
}

double lomax_cdf(const LomaxParams& p, double x) {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-p.shape * std::log1p(x / p.scale));
}

double lomax_log_likelihood(const LomaxParams& p, std::span<const double> sample) {
  const double n = static_cast<double>(sample.size());
  return n * (std::log(p.shape) - std::log(p.scale)) - (p.shape + 1.0) * sum_log1p(p.scale, sample);
}

double lomax_shape_given_scale(double scale, std::span<const double> sample) {
  return static_cast<double>(sample.size()) / sum_log1p(scale, sample);
}

double lomax_profile_log_likelihood(double scale, std::span<const double> sample) {
  const double s = sum_log1p(scale, sample);
  const double n = static_cast<double>(sample.size());
  const double shape = n / s;
  return n * (std::log(shape) - std::log(scale)) - (shape + 1.0) * s;
}

LomaxParams lomax_fit(std::span<const double> sample) {
  if (sample.size() < 10) throw StatsError(StatsErrc::Empty, "Lomax fit needs at least 10 values");
  bool any_positive = false;
  for (const double x : sample) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw StatsError(StatsErrc::InvalidArgument, "sample values must be finite and >= 0");
    any_positive |= x > 0.0;
  }
  if (!any_positive) throw StatsError(StatsErrc::DegenerateSample, "every sample value is zero");

  const double lo = std::log(1e-4);
  const double hi = std::log(1e4);
  auto f = [&](double log_scale) { return lomax_profile_log_likelihood(std::exp(log_scale), sample); };

  constexpr int kGrid = 160;
  const double step = (hi - lo) / kGrid;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double v = f(lo + i * step);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + std::max(best - 1, 0) * step;
  double b = lo + std::min(best + 1, kGrid) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-8) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double log_scale = 0.5 * (a + b);
  // The grid point itself wins at a boundary of the search range.
  if (f(lo + best * step) > f(log_scale)) log_scale = lo + best * step;
  const double scale = std::exp(log_scale);
  return {lomax_shape_given_scale(scale, sample), scale};
}

double lomax_quantile(const LomaxParams& p, double u) {
  return p.scale * std::expm1(-std::log1p(-u) / p.shape);
}

std::vector<double> lomax_sample(const LomaxParams& p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = lomax_quantile(p, unif(rng));
  return out;
}

double ks_statistic(std::span<const double> sample, const LomaxParams& p) {
  if (sample.empty()) throw StatsError(StatsErrc::Empty, "KS statistic of an empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fx = lomax_cdf(p, xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - fx, fx - static_cast<double>(i) / n});
  }
  return d;
}

HistogramSpec histogram(std::string group, std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw StatsError(StatsErrc::InvalidArgument, "bins must be at least 1");
  if (values.empty()) throw StatsError(StatsErrc::Empty, "histogram of no values");
  HistogramSpec h;
  h.group = std::move(group);
  h.count = values.size();
  const double width = 1.0 / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(static_cast<double>(i) / static_cast<double>(bins));
  std::vector<std::size_t> counts(bins, 0);
  for (const double v : values) {
    const double pos = std::floor(std::clamp(v, 0.0, 1.0) * static_cast<double>(bins));
    ++counts[std::min(static_cast<std::size_t>(pos), bins - 1)];
  }
  for (const auto c : counts) h.densities.push_back(static_cast<double>(c) / (static_cast<double>(h.count) * width));
  return h;
}

std::vector<HistogramSpec> genre_histograms(const PropertyGraph& graph, std::size_t bins) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto r : graph.vertices_of(VertexKind::Genre)) {
    const std::string key = render(graph.vertex(r).attrs.at("description"));
    auto& values = groups[key];
    for (const auto& link : graph.adjacency(r, EdgeKind::HasGenre, Direction::In)) {
      for (const auto& own : graph.adjacency(link.vertex, EdgeKind::Owns, Direction::In)) {
        const auto& attrs = graph.edge(own.edge).attrs;
        if (auto it = attrs.find(kAttainmentAttr); it != attrs.end()) {
          if (auto v = as_real(it->second)) values.push_back(*v);
        }
      }
    }
  }
  std::vector<HistogramSpec> out;
  for (auto& [key, values] : groups) {
    if (!values.empty()) out.push_back(histogram(key, values, bins));
  }
  return out;
}

std::vector<double> attainment_sample(const PropertyGraph& graph) {
  std::vector<double> out;
  for (const auto& e : graph.edges()) {
    if (e.kind != EdgeKind::Owns) continue;
    if (auto it = e.attrs.find(kAttainmentAttr); it != e.attrs.end()) {
      if (auto v = as_real(it->second)) out.push_back(*v);
    }
  }
  return out;
}

void write_folds_tsv(std::ostream& out, std::span<const cf::FoldMetrics> folds) {
  out << "fold\tn_train\tn_test\trmse\tmae\tbaseline_rmse\tbaseline_mae\n";
  for (const auto& f : folds) {
    out << f.fold << '\t' << f.n_train << '\t' << f.n_test << '\t' << format_real(f.rmse, 6) << '\t'
        << format_real(f.mae, 6) << '\t' << format_real(f.baseline_rmse, 6) << '\t' << format_real(f.baseline_mae, 6)
        << '\n';
  }
}

void write_pr_tsv(std::ostream& out, std::span<const PrPoint> points) {
  out << "threshold\tn\tprecision\trecall\tusers_precision\tusers_recall\n";
  for (const auto& p : points) {
    out << format_real(p.threshold, 6) << '\t' << p.n << '\t' << format_real(p.precision, 6) << '\t'
        << format_real(p.recall, 6) << '\t' << p.users_precision << '\t' << p.users_recall << '\n';
  }
}

void write_histograms_tsv(std::ostream& out, std::span<const HistogramSpec> hists) {
  out << "group\tcount\tbin\tlo\thi\tdensity\n";
  for (const auto& h : hists) {
    for (std::size_t i = 0; i < h.densities.size(); ++i) {
      out << h.group << '\t' << h.count << '\t' << i << '\t' << format_real(h.edges[i]) << '\t'
          << format_real(h.edges[i + 1]) << '\t' << format_real(h.densities[i], 12) << '\n';
    }
  }
}

void write_plot_data(std::ostream& out, std::span<const HistogramSpec> hists) {
  for (const auto& h : hists) {
    for (std::size_t i = 0; i < h.densities.size(); ++i) {
      nlohmann::ordered_json j;
      j["group"] = h.group;
      j["bin"] = i;
      j["lo"] = h.edges[i];
      j["hi"] = h.edges[i + 1];
      j["density"] = h.densities[i];
      out << j.dump() << '\n';
    }
  }
}

}  // namespace achgraph::stats
