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

// Data-parallel inner loops. Each kernel has an OpenMP implementation and a
// plain serial reference; both produce bit-identical results because every
// output element is computed independently with the same arithmetic.

#include <span>
#include <vector>

#include "onmar/common.hpp"

namespace onmar::kernels {

enum class Metric { euclidean, manhattan, cosine, minkowski_p3 };

enum class Exec { serial, parallel };

double distance(Metric metric, std::span<const double> a, std::span<const double> b);

/// n x k matrix of distances from every point to every centroid.
Matrix distance_matrix(const Matrix& points, const Matrix& centroids, Metric metric,
                       Exec exec = Exec::parallel);

/// Index of the nearest centroid for each point; ties go to the lowest index.
std::vector<int> nearest_labels(const Matrix& points, const Matrix& centroids, Metric metric,
                                Exec exec = Exec::parallel);

/// Full symmetric n x n Euclidean distance matrix.
Matrix pairwise_distances(const Matrix& points, Exec exec = Exec::parallel);

/// For every row of `samples` (a flattened set of k centroids in d dims),
/// assign each point to its nearest centroid and score the assignment with
/// clustering accuracy against `truth`.
std::vector<double> landscape_accuracies(const Matrix& points, std::span<const int> truth,
                                         const Matrix& samples, int k, Metric metric,
                                         Exec exec = Exec::parallel);

}  // namespace onmar::kernels
