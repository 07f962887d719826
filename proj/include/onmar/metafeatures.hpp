// Copyright 2026 The OnMAR Authors
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

// Application-agnostic meta-features: exploratory landscape analysis over a
// Latin hypercube sample, plus dataset statistics.

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "onmar/application.hpp"
#include "onmar/kernels.hpp"

namespace onmar::ela {

using Bounds = std::vector<std::pair<double, double>>;

/// One point per stratum in every dimension, strata paired by independent
/// random permutations. Throws std::invalid_argument for lo >= hi or n == 0.
Matrix latin_hypercube_sample(std::size_t n_samples, const Bounds& bounds, Rng& rng);

struct YDistribution {
  double skewness = 0.0;
  double kurtosis = 0.0;  // excess
  int n_peaks = 1;
};

YDistribution y_distribution(std::span<const double> ys);

/// Number of local maxima of a Gaussian KDE (Silverman bandwidth) on a
/// 512-point grid.
int kde_peak_count(std::span<const double> ys);
double silverman_bandwidth(std::span<const double> ys);

struct MetaModel {
  Scored r2_lin_adj;
  Scored lin_coef_min;
  Scored lin_coef_max;
  Scored r2_quad_adj;
  Scored quad_coef_min;
  Scored quad_coef_max;
  bool lin_rank_deficient = false;
  bool quad_rank_deficient = false;
};

/// Least-squares linear and (linear + squared terms) models of ys on xs.
MetaModel meta_model(const LandscapeSample& sample);

inline constexpr std::array<double, 4> kDispersionQuantiles{0.02, 0.05, 0.10, 0.25};

struct Dispersion {
  std::array<Scored, 4> ratio;
  std::array<Scored, 4> diff;
};

Dispersion dispersion(const LandscapeSample& sample);

struct InformationContent {
  double h_max = 0.0;
  double settling_sensitivity = 0.0;
  double eps_s = 0.0;  // epsilon at which h_max is attained
  double m0_ratio = 0.0;
  double initial_partial_information = 0.0;
};

/// Visiting order of a greedy nearest-neighbour tour starting at row 0.
std::vector<std::size_t> nearest_neighbour_tour(const Matrix& xs);

/// Symbols in {-1, 0, +1} for successive differences under tolerance eps.
std::vector<int> ic_symbols(std::span<const double> diffs, double eps);

/// Entropy (base 6) of consecutive unequal symbol pairs.
double ic_entropy(std::span<const int> symbols);

/// Length of the alternating non-zero subsequence divided by the number of symbols.
double ic_partial_information(std::span<const int> symbols);

std::vector<double> ic_epsilon_grid(double y_range);

InformationContent information_content(const LandscapeSample& sample);

struct Nbc {
  Scored sd_ratio;
  Scored mean_ratio;
  Scored dist_correlation;
  Scored cv_ratio;
  Scored indegree_cv;
};

struct NeighbourDistances {
  std::vector<double> nearest;
  std::vector<double> nearest_better;
  std::vector<int> indegree;
};

NeighbourDistances neighbour_distances(const LandscapeSample& sample);
Nbc nbc(const LandscapeSample& sample);

struct DatasetStats {
  double imbalance = 0.0;
  int classes = 0;
  std::size_t instances = 0;
};

DatasetStats dataset_stats(const LabeledDataset& data);

/// Per-dimension [min, max] of the dataset features, widened where flat.
Bounds feature_bounds(const LabeledDataset& data);

/// LHS over k flattened centroids; each sample is scored by the accuracy of
/// nearest-centroid assignment under `metric`.
LandscapeSample build_landscape(const LabeledDataset& data, int k, kernels::Metric metric, std::size_t n_samples,
                                Rng& rng, kernels::Exec exec = kernels::Exec::parallel);

/// Appends every agnostic ELA feature, in schema order.
void append_landscape_features(const LandscapeSample& sample, FeatureBlock& out);

}  // namespace onmar::ela

namespace onmar {

/// Combines landscape, dataset and timestep features with the application's
/// own features into one vector.
class MetaFeatureExtractor {
 public:
  struct Options {
    std::size_t landscape_samples = 64;
    std::uint64_t seed = 0;
  };

  explicit MetaFeatureExtractor(Options options) : options_(options) {}

  const Options& options() const { return options_; }
  void reseed(std::uint64_t seed) { options_.seed = seed; }

  MetaFeatureVector extract(const ApplicationAlgorithm& app, int timestep) const;

  /// Ordered feature names for `app`.
  FeatureNames schema(const ApplicationAlgorithm& app) const;

 private:
  FeatureBlock collect(const ApplicationAlgorithm& app, int timestep) const;

  Options options_;
};

}  // namespace onmar
