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

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "onmar/cluster_metrics.hpp"

namespace onmar::metrics {

// Hungarian method (shortest augmenting paths with potentials) on the square
// padding of the weight table, minimising (max_weight - weight).
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  const std::size_t rows = weights.size();
  if (rows == 0) return {};
  const std::size_t cols = weights.front().size();
  for (const auto& r : weights)
    if (r.size() != cols) throw std::invalid_argument("ragged weight table");
  const std::size_t n = std::max(rows, cols);

  double top = 0.0;
  for (const auto& r : weights)
    for (double w : r) top = std::max(top, w);
  auto cost = [&](std::size_t i, std::size_t j) {
    const double w = (i < rows && j < cols) ? weights[i][j] : 0.0;
    return top - w;
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays, index 0 is the virtual root
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match[j];
    if (i >= 1 && i <= rows && j <= cols) row_to_col[i - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

double clustering_accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("clustering_accuracy: length mismatch");
  if (pred.empty()) return 0.0;
  const Contingency c = intersection_cardinalities(pred, truth);
  std::vector<std::vector<double>> w(c.table.size());
  for (std::size_t i = 0; i < c.table.size(); ++i) w[i].assign(c.table[i].begin(), c.table[i].end());
  const std::vector<int> match = max_weight_assignment(w);
  long long correct = 0;
  for (std::size_t i = 0; i < match.size(); ++i)
    if (match[i] >= 0) correct += c.table[i][static_cast<std::size_t>(match[i])];
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace onmar::metrics
