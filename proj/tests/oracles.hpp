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

// Deliberately naive reference implementations used to derive and check
// expected values. None of them share code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "onmar/common.hpp"

namespace oracle {

using onmar::Matrix;

/// k-nearest-neighbour mean after z-scoring with population statistics,
/// ranking every training row by (distance, index).
inline double knn_mean(const Matrix& train, const std::vector<double>& targets, const std::vector<double>& query,
                       std::size_t k) {
  const std::size_t n = train.rows(), w = train.cols();
  std::vector<double> mean(w, 0.0), sd(w, 0.0);
  for (std::size_t j = 0; j < w; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += train(i, j);
    mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) sd[j] += (train(i, j) - mean[j]) * (train(i, j) - mean[j]);
    sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
    if (sd[j] == 0.0) sd[j] = 1.0;
  }
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w; ++j) {
      const double a = (train(i, j) - mean[j]) / sd[j];
      const double b = (query[j] - mean[j]) / sd[j];
      s += (a - b) * (a - b);
    }
    all.emplace_back(s, i);
  }
  std::sort(all.begin(), all.end());
  k = std::min(k, n);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += targets[all[i].second];
  return total / static_cast<double>(k);
}

/// Best accuracy over every partial one-to-one mapping of predicted clusters
/// onto classes, by exhaustive search.
inline double exhaustive_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const int kp = *std::max_element(pred.begin(), pred.end()) + 1;
  const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
  std::vector<std::vector<int>> count(static_cast<std::size_t>(kp), std::vector<int>(static_cast<std::size_t>(kt), 0));
  for (std::size_t i = 0; i < pred.size(); ++i) ++count[static_cast<std::size_t>(pred[i])][static_cast<std::size_t>(truth[i])];
  std::vector<char> used(static_cast<std::size_t>(kt), 0);
  std::function<int(int)> best = [&](int c) -> int {
    if (c == kp) return 0;
    int b = best(c + 1);  // cluster c left unmatched
    for (int t = 0; t < kt; ++t) {
      if (used[static_cast<std::size_t>(t)]) continue;
      used[static_cast<std::size_t>(t)] = 1;
      b = std::max(b, count[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] + best(c + 1));
      used[static_cast<std::size_t>(t)] = 0;
    }
    return b;
  };
  return static_cast<double>(best(0)) / static_cast<double>(pred.size());
}

/// [truth same/diff][pred same/diff] by enumerating unordered pairs.
inline std::array<std::array<long long, 2>, 2> pair_confusion(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::array<std::array<long long, 2>, 2> m{};
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t j = i + 1; j < pred.size(); ++j) ++m[truth[i] == truth[j] ? 0 : 1][pred[i] == pred[j] ? 0 : 1];
  return m;
}

struct LloydResult {
  std::vector<int> labels;
  Matrix centroids;
};

/// One textbook Lloyd iteration under Euclidean distance.
inline LloydResult lloyd_step(const Matrix& x, const Matrix& c) {
  LloydResult r{std::vector<int>(x.rows()), c};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = INFINITY;
    for (std::size_t j = 0; j < c.rows(); ++j) {
      double s = 0.0;
      for (std::size_t f = 0; f < x.cols(); ++f) s += (x(i, f) - c(j, f)) * (x(i, f) - c(j, f));
      if (s < best) {
        best = s;
        r.labels[i] = static_cast<int>(j);
      }
    }
  }
  for (std::size_t j = 0; j < c.rows(); ++j) {
    std::vector<double> sum(x.cols(), 0.0);
    int n = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (r.labels[i] == static_cast<int>(j)) {
        ++n;
        for (std::size_t f = 0; f < x.cols(); ++f) sum[f] += x(i, f);
      }
    if (n > 0)
      for (std::size_t f = 0; f < x.cols(); ++f) r.centroids(j, f) = sum[f] / n;
  }
  return r;
}

/// Exact one-sided rank-sum p-values by enumerating every way to choose which
/// ranks belong to a (untied data only). Returns {P(U <= u), P(U >= u)}.
inline std::pair<double, double> mwu_enumerate(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all = a;
  all.insert(all.end(), b.begin(), b.end());
  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  auto rank = [&](double v) { return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()) + 1.0; };
  const std::size_t na = a.size(), n = all.size();
  double ra = 0.0;
  for (double v : a) ra += rank(v);
  const double u = ra - static_cast<double>(na * (na + 1)) / 2.0;
  long long le = 0, ge = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s += static_cast<double>(i + 1);
    const double uu = s - static_cast<double>(na * (na + 1)) / 2.0;
    ++total;
    if (uu <= u) ++le;
    if (uu >= u) ++ge;
  }
  return {static_cast<double>(le) / static_cast<double>(total), static_cast<double>(ge) / static_cast<double>(total)};
}

/// Peak count of a Gaussian KDE with bandwidth h, found by sign changes of the
/// derivative on a dense grid.
inline int kde_peaks(const std::vector<double>& ys, double h, std::size_t grid = 20001) {
  const double lo = *std::min_element(ys.begin(), ys.end()) - 3.0 * h;
  const double hi = *std::max_element(ys.begin(), ys.end()) + 3.0 * h;
  int peaks = 0;
  double prev_slope = 0.0;
  for (std::size_t g = 0; g < grid; ++g) {
    const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid - 1);
    double slope = 0.0;
    for (double y : ys) slope += -(x - y) * std::exp(-0.5 * (x - y) * (x - y) / (h * h));
    if (g > 0 && prev_slope > 0.0 && slope <= 0.0) ++peaks;
    prev_slope = slope;
  }
  return peaks;
}

inline double biased_skewness(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  const double m = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : y) {
    m2 += (v - m) * (v - m);
    m3 += (v - m) * (v - m) * (v - m);
  }
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

}  // namespace oracle
