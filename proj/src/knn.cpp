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
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ml_internal.hpp"

namespace onmar::ml {

namespace {

std::vector<double> normalise(const MetaLearnerModel& model, std::span<const double> x) {
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - model.mean[j]) / model.scale[j];
  return z;
}

}  // namespace

void fit_knn(MetaLearnerModel& model, const TrainingMatrix& data) {
  const std::size_t n = data.features.rows();
  const std::size_t w = data.features.cols();
  model.mean.assign(w, 0.0);
  model.scale.assign(w, 1.0);
  for (std::size_t j = 0; j < w; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += data.features(i, j);
    m /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += (data.features(i, j) - m) * (data.features(i, j) - m);
    const double sd = std::sqrt(v / static_cast<double>(n));
    model.mean[j] = m;
    // constant columns keep unit scale
    model.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  model.rows = Matrix(n, w);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < w; ++j) model.rows(i, j) = (data.features(i, j) - model.mean[j]) / model.scale[j];
  model.targets = data.targets;
  model.classes = data.classes;
}

std::vector<std::size_t> knn_neighbours(const MetaLearnerModel& model, std::span<const double> x) {
  const std::vector<double> z = normalise(model, x);
  const std::size_t n = model.rows.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const auto r = model.rows.row(i);
    for (std::size_t j = 0; j < z.size(); ++j) s += (r[j] - z[j]) * (r[j] - z[j]);
    dist[i] = {s, i};
  }
  const std::size_t k = std::min(std::max<std::size_t>(model.hyper.knn_k, 1), n);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

double knn_value(const MetaLearnerModel& model, std::span<const double> x) {
  const auto nb = knn_neighbours(model, x);
  double s = 0.0;
  for (std::size_t i : nb) s += model.targets[i];
  return s / static_cast<double>(nb.size());
}

int knn_class(const MetaLearnerModel& model, std::span<const double> x) {
  const auto nb = knn_neighbours(model, x);
  std::vector<int> votes(model.designs.size(), 0);
  for (std::size_t i : nb) ++votes[static_cast<std::size_t>(model.classes[i])];
  const int top = *std::max_element(votes.begin(), votes.end());
  // among tied classes, the one holding the nearest neighbour wins
  for (std::size_t i : nb)
    if (votes[static_cast<std::size_t>(model.classes[i])] == top) return model.classes[i];
  return model.classes[nb.front()];
}

}  // namespace onmar::ml
