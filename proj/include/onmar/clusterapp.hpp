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

// Composable iterative clustering algorithm. A design picks the distance
// measure, centroid initialisation, assignment rule, centroid update, k and
// the online learning rate; one timestep runs one iteration.

#include <cstdint>
#include <optional>

#include "onmar/application.hpp"
#include "onmar/cluster_metrics.hpp"
#include "onmar/kernels.hpp"

namespace onmar {

enum class InitRule { uniform_random, sample_points, spread_maximal };
enum class AssignRule { hard_nearest, softmax_weighted };
enum class UpdateRule { mean, median, online_eta };

/// Gene schema "cluster-v1": distance, init, assignment, update, k in [2, 10],
/// eta in [0.01, 0.5].
const GeneSchema& cluster_schema();

struct ClusterDesign {
  kernels::Metric metric = kernels::Metric::euclidean;
  InitRule init = InitRule::sample_points;
  AssignRule assign = AssignRule::hard_nearest;
  UpdateRule update = UpdateRule::mean;
  int k = 2;
  double eta = 0.1;
};

ClusterDesign decode(const Design& design);
Design encode_design(const ClusterDesign& design);

struct ClusterState {
  metrics::Clustering clustering;  // k == 0 until the first step
  int iteration = 0;
  std::uint64_t init_seed = 0;
};

/// Initial centroids for `design` under the state's seed and iteration.
Matrix initial_centroids(const ClusterState& state, const ClusterDesign& design, const LabeledDataset& data);

/// One iteration: re-initialise if k changed, assign, repair empty clusters,
/// update centroids. Returns the clustering accuracy of the new assignments.
double app_step(ClusterState& state, const ClusterDesign& design, const LabeledDataset& data,
                kernels::Exec exec = kernels::Exec::serial);
double app_step(ClusterState& state, const Design& design, const LabeledDataset& data,
                kernels::Exec exec = kernels::Exec::serial);

/// Accuracy of one step from a copy of `state`; `state` is untouched.
double ga_fitness_for_timestep(const Design& design, const ClusterState& state, const LabeledDataset& data);

/// Names of the clustering-specific meta-features, in emission order.
const FeatureNames& cluster_feature_names();

class ClusterApp final : public ApplicationAlgorithm {
 public:
  ClusterApp() = default;

  const GeneSchema& schema() const override { return cluster_schema(); }
  void reset(const LabeledDataset& data, std::uint64_t seed) override;
  const LabeledDataset& dataset() const override { return data_; }
  double exec(const Design& design, int timestep) override;
  double evaluate(const Design& design) const override;
  LandscapeSample sample_landscape(std::size_t n_samples, Rng& rng) const override;
  void specific_features(FeatureBlock& out) const override;

  const ClusterState& state() const { return state_; }
  const std::optional<ClusterDesign>& current_design() const { return current_; }

 private:
  LabeledDataset data_;
  ClusterState state_;
  std::optional<ClusterDesign> current_;
};

}  // namespace onmar
