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

#include "onmar/metalearners.hpp"

namespace onmar::ml {

void fit_knn(MetaLearnerModel& model, const TrainingMatrix& data);
double knn_value(const MetaLearnerModel& model, std::span<const double> x);
int knn_class(const MetaLearnerModel& model, std::span<const double> x);

/// Per-feature positions into `sample`, stably sorted by feature value.
std::vector<std::vector<std::size_t>> presort(const Matrix& x, std::span<const std::size_t> sample);

/// Presorted positions of a (bootstrap) sample, derived from presort(x, all rows)
/// without sorting again.
std::vector<std::vector<std::size_t>> expand_presort(const std::vector<std::vector<std::size_t>>& row_order,
                                                     std::span<const std::size_t> sample, std::size_t n_rows);

Tree build_classification_tree(const Matrix& x, std::span<const int> cls, int n_classes,
                               std::span<const std::size_t> sample, const std::vector<std::vector<std::size_t>>& order,
                               const TreeParams& params, Rng& rng);

/// As build_regression_tree, reusing an order from presort(x, sample).
Tree build_regression_tree(const Matrix& x, std::span<const double> y, std::span<const std::size_t> sample,
                           const std::vector<std::vector<std::size_t>>& order, const TreeParams& params, Rng& rng);

}  // namespace onmar::ml
