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
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "achgraph/cf.hpp"
#include "achgraph/graph.hpp"

namespace achgraph::stats {

enum class StatsErrc { LengthMismatch, Empty, DegenerateSample, InvalidArgument };

class StatsError : public std::runtime_error {
 public:
  StatsError(StatsErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  StatsErrc code() const noexcept { return code_; }

 private:
  StatsErrc code_;
};

double rmse(std::span<const double> pred, std::span<const double> truth);
double mae(std::span<const double> pred, std::span<const double> truth);

struct PrPoint {
  double threshold = 0.0;
  std::size_t n = 0;
  double precision = 0.0;
  double recall = 0.0;
  /// Users with a nonempty recommended set (precision) and relevant set (recall).
  std::size_t users_precision = 0;
  std::size_t users_recall = 0;
};

/// {0.00, 0.05, ..., 0.50}.
std::vector<double> default_thresholds();

/// Per user, test items ranked by prediction (ties by ascending item);
/// recommended = top n with prediction >= t, relevant = rating >= t.
/// Precision and recall are averaged over the users where they are defined.
std::vector<PrPoint> precision_recall_at_n(const cf::SvdppModel& model, std::span<const cf::Triple> test,
                                           std::size_t n, std::span<const double> thresholds);

struct LomaxParams {
  double shape = 1.0;
  double scale = 1.0;
};

double lomax_cdf(const LomaxParams& p, double x);
double lomax_log_likelihood(const LomaxParams& p, std::span<const double> sample);
/// Log-likelihood at λ with α set to its conditional maximum n / Σ ln(1 + x/λ).
double lomax_profile_log_likelihood(double scale, std::span<const double> sample);
/// Conditional maximum of α for fixed λ.
double lomax_shape_given_scale(double scale, std::span<const double> sample);

/// Maximum-likelihood fit. λ maximizes the profile likelihood over
/// [1e-4, 1e4], searched in ln λ: a coarse grid brackets the best point and
/// golden-section search refines it to 1e-8. Throws Empty for fewer than 10
/// values, InvalidArgument for negative or non-finite values and
/// DegenerateSample when every value is zero.
LomaxParams lomax_fit(std::span<const double> sample);

/// Inversion: x = λ((1 - u)^(-1/α) - 1).
double lomax_quantile(const LomaxParams& p, double u);
std::vector<double> lomax_sample(const LomaxParams& p, std::size_t n, std::uint64_t seed);

/// One-sample Kolmogorov-Smirnov distance. Throws Empty.
double ks_statistic(std::span<const double> sample, const LomaxParams& p);

struct HistogramSpec {
  std::string group;
  /// bins + 1 uniform edges over [0,1].
  std::vector<double> edges;
  std::vector<double> densities;
  std::size_t count = 0;
};

/// Density-normalized histogram of values in [0,1]; 1.0 falls in the last bin.
HistogramSpec histogram(std::string group, std::span<const double> values, std::size_t bins);

/// One histogram per genre over the ratings of Owns edges into games of that
/// genre, ordered by genre description. Genres without rated ownership are
/// omitted.
std::vector<HistogramSpec> genre_histograms(const PropertyGraph& graph, std::size_t bins = 50);

/// Every attainmentRating on Owns edges, in edge order.
std::vector<double> attainment_sample(const PropertyGraph& graph);

/// Tab-separated tables with a header row.
void write_folds_tsv(std::ostream& out, std::span<const cf::FoldMetrics> folds);
void write_pr_tsv(std::ostream& out, std::span<const PrPoint> points);
void write_histograms_tsv(std::ostream& out, std::span<const HistogramSpec> hists);
/// One JSON object per line: {"group":..,"bin":..,"lo":..,"hi":..,"density":..}.
void write_plot_data(std::ostream& out, std::span<const HistogramSpec> hists);

}  // namespace achgraph::stats
