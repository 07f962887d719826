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

// Clustering quality measures used both as the performance signal and as
// application-specific meta-features.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "onmar/common.hpp"
#include "onmar/kernels.hpp"

namespace onmar::metrics {

struct Clustering {
  std::vector<int> assignments;
  Matrix centroids;  // k x d
  int k = 0;
};

bool is_valid(const Clustering& c);

struct ExternalScores {
  double ari = 0.0;
  double ami = 0.0;
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
  double fowlkes_mallows = 0.0;
};

/// Contingency-based agreement between a predicted partition and the truth.
/// Throws std::invalid_argument for fewer than two instances or mismatched lengths.
ExternalScores external_scores(std::span<const int> pred, std::span<const int> truth);

struct InternalScores {
  Scored silhouette;
  Scored davies_bouldin;
  Scored calinski_harabasz;
};

/// Euclidean internal indices. Empty clusters are dropped first; fewer than two
/// occupied clusters makes every index undefined.
InternalScores internal_scores(const Matrix& data, std::span<const int> labels,
                               kernels::Exec exec = kernels::Exec::parallel);

/// Mean silhouette coefficient with singleton clusters contributing 0.
double silhouette(const Matrix& pairwise, std::span<const int> labels);

/// Unordered pair counts. Rows index the truth (same, different), columns the
/// prediction (same, different). Entries sum to n(n-1)/2.
using PairConfusion = std::array<std::array<long long, 2>, 2>;
PairConfusion pair_confusion(std::span<const int> pred, std::span<const int> truth);

struct Contingency {
  std::vector<std::vector<long long>> table;  // [pred cluster][true class]
  double max = 0.0;                           // largest normalised cell
  double mean = 0.0;                          // mean normalised cell
  double entropy = 0.0;                       // Shannon entropy (nats) of normalised table
};

/// |pred_i ∩ true_j| for every label pair, labels taken as 0..max.
Contingency intersection_cardinalities(std::span<const int> pred, std::span<const int> truth);

struct CentroidDistances {
  Scored cosine;
  Scored euclidean;
  Scored minkowski_p3;
  Scored manhattan;
  Scored hamming;
};

/// Mean distance over all centroid pairs for each metric. Hamming compares the
/// sign patterns (x > 0) of the centroids.
CentroidDistances centroid_distance_features(const Matrix& centroids);

struct PmfFeatures {
  Scored bernoulli;
  Scored laplacian;
  Scored zeta;
  Scored poisson;
  Scored planck;
  Scored logarithmic_series;
  Scored yule_simon;
};

/// Fits each discrete family to the cluster sizes by moment matching and
/// evaluates its PMF at the modal cluster size.
PmfFeatures pmf_features(std::span<const int> pred);

/// Fraction of instances correctly labelled under the best one-to-one mapping
/// from predicted clusters to true classes (optimal assignment).
double clustering_accuracy(std::span<const int> pred, std::span<const int> truth);

/// Maximum-weight assignment on a rows x cols weight table. Returns, for each
/// row, the matched column or -1. Exposed for testing.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

}  // namespace onmar::metrics
