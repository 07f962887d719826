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

#include "onmar/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "onmar/cluster_metrics.hpp"

namespace onmar::kernels {

double distance(Metric metric, std::span<const double> a, std::span<const double> b) {
  const std::size_t d = a.size();
  switch (metric) {
    case Metric::euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double t = a[i] - b[i];
        s += t * t;
      }
      return std::sqrt(s);
    }
    case Metric::manhattan: {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += std::abs(a[i] - b[i]);
      return s;
    }
    case Metric::cosine: {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
      }
      // zero vectors have no direction; treat them as orthogonal to everything
      if (na == 0.0 || nb == 0.0) return 1.0;
      return 1.0 - dot / std::sqrt(na * nb);
    }
    case Metric::minkowski_p3: {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double t = std::abs(a[i] - b[i]);
        s += t * t * t;
      }
      return std::cbrt(s);
    }
  }
  throw std::logic_error("unknown metric");
}

namespace {

void check_widths(const Matrix& points, const Matrix& centroids) {
  if (points.cols() != centroids.cols()) throw std::invalid_argument("dimension mismatch between points and centroids");
}

int argmin_row(std::span<const double> row) {
  int best = 0;
  for (std::size_t j = 1; j < row.size(); ++j)
    if (row[j] < row[best]) best = static_cast<int>(j);
  return best;
}

int nearest(const Matrix& centroids, std::span<const double> x, Metric metric) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.rows(); ++j) {
    const double dj = distance(metric, x, centroids.row(j));
    if (dj < best_d) {
      best_d = dj;
      best = static_cast<int>(j);
    }
  }
  return best;
}

double sample_accuracy(const Matrix& points, std::span<const int> truth, std::span<const double> flat, int k,
                       Metric metric) {
  const std::size_t d = points.cols();
  Matrix centroids(static_cast<std::size_t>(k), d, std::vector<double>(flat.begin(), flat.end()));
  std::vector<int> labels(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) labels[i] = nearest(centroids, points.row(i), metric);
  return metrics::clustering_accuracy(labels, truth);
}

namespace reference {

Matrix distance_matrix(const Matrix& points, const Matrix& centroids, Metric metric) {
  Matrix out(points.rows(), centroids.rows());
  for (std::size_t i = 0; i < points.rows(); ++i)
    for (std::size_t j = 0; j < centroids.rows(); ++j) out(i, j) = distance(metric, points.row(i), centroids.row(j));
  return out;
}

Matrix pairwise_distances(const Matrix& points) {
  const std::size_t n = points.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = distance(Metric::euclidean, points.row(i), points.row(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

std::vector<double> landscape_accuracies(const Matrix& points, std::span<const int> truth, const Matrix& samples,
                                         int k, Metric metric) {
  std::vector<double> out(samples.rows());
  for (std::size_t s = 0; s < samples.rows(); ++s) out[s] = sample_accuracy(points, truth, samples.row(s), k, metric);
  return out;
}

}  // namespace reference

namespace omp {

Matrix distance_matrix(const Matrix& points, const Matrix& centroids, Metric metric) {
  Matrix out(points.rows(), centroids.rows());
  const auto n = static_cast<std::ptrdiff_t>(points.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < centroids.rows(); ++j)
      out(static_cast<std::size_t>(i), j) = distance(metric, points.row(static_cast<std::size_t>(i)), centroids.row(j));
  return out;
}

Matrix pairwise_distances(const Matrix& points) {
  const std::size_t n = points.rows();
  Matrix out(n, n);
  const auto ni = static_cast<std::ptrdiff_t>(n);
  // row i owns cells (i, j) and (j, i) for j > i, so no cell is written twice
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < ni; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = distance(Metric::euclidean, points.row(i), points.row(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

std::vector<double> landscape_accuracies(const Matrix& points, std::span<const int> truth, const Matrix& samples,
                                         int k, Metric metric) {
  std::vector<double> out(samples.rows());
  const auto ns = static_cast<std::ptrdiff_t>(samples.rows());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t s = 0; s < ns; ++s)
    out[static_cast<std::size_t>(s)] =
        sample_accuracy(points, truth, samples.row(static_cast<std::size_t>(s)), k, metric);
  return out;
}

}  // namespace omp

}  // namespace

Matrix distance_matrix(const Matrix& points, const Matrix& centroids, Metric metric, Exec exec) {
  check_widths(points, centroids);
  return exec == Exec::parallel ? omp::distance_matrix(points, centroids, metric)
                                : reference::distance_matrix(points, centroids, metric);
}

std::vector<int> nearest_labels(const Matrix& points, const Matrix& centroids, Metric metric, Exec exec) {
  const Matrix dist = distance_matrix(points, centroids, metric, exec);
  std::vector<int> labels(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) labels[i] = argmin_row(dist.row(i));
  return labels;
}

Matrix pairwise_distances(const Matrix& points, Exec exec) {
  return exec == Exec::parallel ? omp::pairwise_distances(points) : reference::pairwise_distances(points);
}

std::vector<double> landscape_accuracies(const Matrix& points, std::span<const int> truth, const Matrix& samples,
                                         int k, Metric metric, Exec exec) {
  if (k < 1 || samples.cols() != static_cast<std::size_t>(k) * points.cols())
    throw std::invalid_argument("landscape sample width must be k * d");
  if (truth.size() != points.rows()) throw std::invalid_argument("truth length mismatch");
  return exec == Exec::parallel ? omp::landscape_accuracies(points, truth, samples, k, metric)
                                : reference::landscape_accuracies(points, truth, samples, k, metric);
}

}  // namespace onmar::kernels
