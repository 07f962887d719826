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

// kNN, random forest and gradient-boosted trees, each usable as a performance
// regressor (online gating) or a design predictor (offline replay).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "onmar/knowledge.hpp"

namespace onmar::ml {

enum class Kind { knn, rf, gbt };
enum class Mode { regress_performance, predict_design };

std::string to_string(Kind kind);
Kind kind_from_string(const std::string& s);

struct Hyper {
  std::size_t knn_k = 5;
  std::size_t rf_trees = 100;
  int rf_max_depth = 8;
  std::size_t gbt_rounds = 100;
  double gbt_learning_rate = 0.1;
  int gbt_max_depth = 3;
};

/// Rows of learner inputs with either real targets (regression) or indices
/// into `designs` (design prediction).
struct TrainingMatrix {
  Mode mode = Mode::regress_performance;
  Matrix features;
  std::vector<double> targets;
  std::vector<int> classes;
  std::vector<Design> designs;
};

/// Meta-features concatenated with the encoded design; target = performance.
TrainingMatrix regression_matrix(const KnowledgeRepository& kr, const GeneSchema& schema);

/// Meta-features only; target = index of the entry's design among the
/// distinct designs (first-appearance order).
TrainingMatrix design_matrix(const KnowledgeRepository& kr);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output: mean target or class index
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(std::span<const double> x) const;
  int depth() const;
};

struct TreeParams {
  int max_depth = 8;
  std::size_t max_features = 0;  // 0 = consider every feature at each split
};

/// CART regression tree (squared error) on the rows listed in `sample`
/// (duplicates allowed, as in a bootstrap sample).
Tree build_regression_tree(const Matrix& x, std::span<const double> y, std::span<const std::size_t> sample,
                           const TreeParams& params, Rng& rng);

/// CART classification tree (Gini); leaves hold the majority class.
Tree build_classification_tree(const Matrix& x, std::span<const int> cls, int n_classes,
                               std::span<const std::size_t> sample, const TreeParams& params, Rng& rng);

struct Booster {
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;

  double predict(std::span<const double> x) const;
  /// Prediction using only the first `rounds` trees.
  double predict(std::span<const double> x, std::size_t rounds) const;
};

/// A fitted meta-learner. Immutable once returned by fit().
struct MetaLearnerModel {
  Kind kind = Kind::knn;
  Mode mode = Mode::regress_performance;
  Hyper hyper;
  std::size_t width = 0;

  // kNN: z-scored training rows
  std::vector<double> mean;
  std::vector<double> scale;
  Matrix rows;
  std::vector<double> targets;
  std::vector<int> classes;

  std::vector<Tree> forest;
  std::vector<Booster> boosters;  // one for regression, one per design otherwise

  std::vector<Design> designs;

  /// Raw regression output (not clamped).
  double predict_value(std::span<const double> x) const;
  /// Index into `designs`.
  int predict_class(std::span<const double> x) const;
};

/// Throws std::invalid_argument on an empty or inconsistent matrix.
MetaLearnerModel fit(Kind kind, Mode mode, const TrainingMatrix& data, const Hyper& hyper, std::uint64_t seed);

/// Predicted accuracy of `design` under `meta_features`, clamped to [0, 1].
double predict_performance(const MetaLearnerModel& model, const MetaFeatureVector& meta_features,
                           const Design& design, const GeneSchema& schema);

Design predict_design(const MetaLearnerModel& model, const MetaFeatureVector& meta_features);

/// Indices of the k nearest training rows to raw input `x`, nearest
/// first, ties by row index.
std::vector<std::size_t> knn_neighbours(const MetaLearnerModel& model, std::span<const double> x);

nlohmann::json to_json(const MetaLearnerModel& model);
MetaLearnerModel model_from_json(const nlohmann::json& j);

}  // namespace onmar::ml
