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

#include "onmar/cluster_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/zeta.hpp>
#include <boost/math/tools/roots.hpp>

namespace onmar::metrics {

bool is_valid(const Clustering& c) {
  if (c.k < 1) return false;
  if (c.centroids.rows() != static_cast<std::size_t>(c.k)) return false;
  return std::all_of(c.assignments.begin(), c.assignments.end(), [&](int a) { return a >= 0 && a < c.k; });
}

namespace {

void require_same_length(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("label vectors differ in length");
}

std::vector<long long> label_counts(std::span<const int> labels) {
  int top = -1;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("labels must be non-negative");
    top = std::max(top, l);
  }
  std::vector<long long> counts(static_cast<std::size_t>(top + 1), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

double entropy_of(const std::vector<long long>& counts, double n) {
  double h = 0.0;
  for (long long c : counts)
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
  return h;
}

// Expected mutual information of two random partitions with the given
// marginals (hypergeometric model).
double expected_mutual_information(const std::vector<long long>& a, const std::vector<long long>& b, long long n) {
  const double N = static_cast<double>(n);
  const double lg_n = std::lgamma(N + 1.0);
  double emi = 0.0;
  for (long long ai : a) {
    if (ai == 0) continue;
    for (long long bj : b) {
      if (bj == 0) continue;
      const long long lo = std::max(1LL, ai + bj - n);
      const long long hi = std::min(ai, bj);
      const double fixed = std::lgamma(ai + 1.0) + std::lgamma(bj + 1.0) + std::lgamma(N - ai + 1.0) +
                           std::lgamma(N - bj + 1.0) - lg_n;
      for (long long nij = lo; nij <= hi; ++nij) {
        const double x = static_cast<double>(nij);
        const double term = x / N * std::log(N * x / (static_cast<double>(ai) * static_cast<double>(bj)));
        const double lp = fixed - std::lgamma(x + 1.0) - std::lgamma(static_cast<double>(ai - nij) + 1.0) -
                          std::lgamma(static_cast<double>(bj - nij) + 1.0) -
                          std::lgamma(static_cast<double>(n - ai - bj + nij) + 1.0);
        emi += term * std::exp(lp);
      }
    }
  }
  return emi;
}

std::vector<int> compact_labels(std::span<const int> labels, int& k_out) {
  std::map<int, int> remap;
  for (int l : labels) remap.emplace(l, 0);
  int next = 0;
  for (auto& [label, idx] : remap) idx = next++;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
  k_out = next;
  return out;
}

}  // namespace

PairConfusion pair_confusion(std::span<const int> pred, std::span<const int> truth) {
  require_same_length(pred, truth);
  const Contingency c = intersection_cardinalities(pred, truth);
  const auto n = static_cast<long long>(pred.size());
  long long same_same = 0, pred_same = 0, truth_same = 0;
  std::vector<long long> truth_sizes(c.table.empty() ? 0 : c.table.front().size(), 0);
  for (const auto& row : c.table) {
    long long row_total = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      same_same += row[j] * (row[j] - 1) / 2;
      row_total += row[j];
      truth_sizes[j] += row[j];
    }
    pred_same += row_total * (row_total - 1) / 2;
  }
  for (long long s : truth_sizes) truth_same += s * (s - 1) / 2;
  const long long total = n * (n - 1) / 2;
  PairConfusion m{};
  m[0][0] = same_same;
  m[0][1] = truth_same - same_same;
  m[1][0] = pred_same - same_same;
  m[1][1] = total - truth_same - pred_same + same_same;
  return m;
}

Contingency intersection_cardinalities(std::span<const int> pred, std::span<const int> truth) {
  require_same_length(pred, truth);
  const auto pc = label_counts(pred);
  const auto tc = label_counts(truth);
  Contingency c;
  c.table.assign(pc.size(), std::vector<long long>(tc.size(), 0));
  for (std::size_t i = 0; i < pred.size(); ++i)
    ++c.table[static_cast<std::size_t>(pred[i])][static_cast<std::size_t>(truth[i])];
  if (pred.empty()) return c;
  const double n = static_cast<double>(pred.size());
  double cells = 0.0, total = 0.0;
  for (const auto& row : c.table)
    for (long long v : row) {
      const double p = static_cast<double>(v) / n;
      c.max = std::max(c.max, p);
      total += p;
      cells += 1.0;
      if (p > 0.0) c.entropy -= p * std::log(p);
    }
  c.mean = total / cells;
  return c;
}

ExternalScores external_scores(std::span<const int> pred, std::span<const int> truth) {
  require_same_length(pred, truth);
  if (pred.size() < 2) throw std::invalid_argument("external_scores needs at least two instances");
  const auto n = static_cast<long long>(pred.size());
  const double N = static_cast<double>(n);
  const Contingency c = intersection_cardinalities(pred, truth);
  const PairConfusion pc = pair_confusion(pred, truth);

  ExternalScores s;
  {
    const double tp = static_cast<double>(pc[0][0]);
    const double fn = static_cast<double>(pc[0][1]);
    const double fp = static_cast<double>(pc[1][0]);
    const double tn = static_cast<double>(pc[1][1]);
    if (fn == 0.0 && fp == 0.0) {
      s.ari = 1.0;
    } else {
      s.ari = 2.0 * (tp * tn - fn * fp) / ((tp + fn) * (fn + tn) + (tp + fp) * (fp + tn));
    }
    const double pred_pairs = tp + fp;
    const double truth_pairs = tp + fn;
    s.fowlkes_mallows = tp > 0.0 ? tp / std::sqrt(pred_pairs * truth_pairs) : 0.0;
  }

  std::vector<long long> a(c.table.size(), 0);                                     // predicted sizes
  std::vector<long long> b(c.table.empty() ? 0 : c.table.front().size(), 0);      // class sizes
  double mi = 0.0;
  for (std::size_t i = 0; i < c.table.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      a[i] += c.table[i][j];
      b[j] += c.table[i][j];
    }
  for (std::size_t i = 0; i < c.table.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double nij = static_cast<double>(c.table[i][j]);
      if (nij > 0.0)
        mi += nij / N * std::log(N * nij / (static_cast<double>(a[i]) * static_cast<double>(b[j])));
    }
  mi = std::max(mi, 0.0);
  const double h_truth = entropy_of(b, N);
  const double h_pred = entropy_of(a, N);

  s.homogeneity = h_truth == 0.0 ? 1.0 : mi / h_truth;
  s.completeness = h_pred == 0.0 ? 1.0 : mi / h_pred;
  s.v_measure = (s.homogeneity + s.completeness) == 0.0
                    ? 0.0
                    : 2.0 * s.homogeneity * s.completeness / (s.homogeneity + s.completeness);

  const auto occupied = [](const std::vector<long long>& v) {
    return std::count_if(v.begin(), v.end(), [](long long x) { return x > 0; });
  };
  if (occupied(a) == 1 && occupied(b) == 1) {
    s.ami = 1.0;
  } else {
    const double emi = expected_mutual_information(a, b, n);
    double denom = 0.5 * (h_truth + h_pred) - emi;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    denom = denom < 0.0 ? std::min(denom, -eps) : std::max(denom, eps);
    s.ami = (mi - emi) / denom;
  }
  return s;
}

double silhouette(const Matrix& pairwise, std::span<const int> labels) {
  const std::size_t n = labels.size();
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  std::vector<double> sizes(static_cast<std::size_t>(k), 0.0);
  for (int l : labels) sizes[static_cast<std::size_t>(l)] += 1.0;

  double total = 0.0;
  std::vector<double> sums(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(labels[i]);
    if (sizes[own] <= 1.0) continue;  // singleton contributes 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) sums[static_cast<std::size_t>(labels[j])] += pairwise(i, j);
    const double a = sums[own] / (sizes[own] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c)
      if (c != own && sizes[c] > 0.0) b = std::min(b, sums[c] / sizes[c]);
    const double m = std::max(a, b);
    if (m > 0.0 && std::isfinite(b)) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

InternalScores internal_scores(const Matrix& data, std::span<const int> labels, kernels::Exec exec) {
  if (data.rows() != labels.size()) throw std::invalid_argument("internal_scores: length mismatch");
  InternalScores out{Scored::undefined(), Scored::undefined(), Scored::undefined()};
  int k = 0;
  const std::vector<int> compact = compact_labels(labels, k);
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  if (k < 2) return out;

  if (static_cast<std::size_t>(k) < n) {
    const Matrix pw = kernels::pairwise_distances(data, exec);
    out.silhouette = {silhouette(pw, compact), true};
  }

  Matrix centroids(static_cast<std::size_t>(k), d);
  std::vector<double> sizes(static_cast<std::size_t>(k), 0.0);
  std::vector<double> overall(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(compact[i]);
    sizes[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      centroids(c, j) += data(i, j);
      overall[j] += data(i, j);
    }
  }
  for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c)
    for (std::size_t j = 0; j < d; ++j) centroids(c, j) /= sizes[c];
  for (double& v : overall) v /= static_cast<double>(n);

  // Davies-Bouldin
  std::vector<double> scatter(static_cast<std::size_t>(k), 0.0);
  double within = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(compact[i]);
    scatter[c] += kernels::distance(kernels::Metric::euclidean, data.row(i), centroids.row(c));
    for (std::size_t j = 0; j < d; ++j) {
      const double t = data(i, j) - centroids(c, j);
      within += t * t;
    }
  }
  for (std::size_t c = 0; c < scatter.size(); ++c) scatter[c] /= sizes[c];
  bool separated = true;
  double db = 0.0;
  for (std::size_t i = 0; i < scatter.size() && separated; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < scatter.size(); ++j) {
      if (i == j) continue;
      const double sep = kernels::distance(kernels::Metric::euclidean, centroids.row(i), centroids.row(j));
      if (sep == 0.0) {
        separated = false;
        break;
      }
      worst = std::max(worst, (scatter[i] + scatter[j]) / sep);
    }
    db += worst;
  }
  if (separated) out.davies_bouldin = {db / static_cast<double>(k), true};

  // Calinski-Harabasz
  double between = 0.0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double t = centroids(c, j) - overall[j];
      sq += t * t;
    }
    between += sizes[c] * sq;
  }
  if (within > 0.0)
    out.calinski_harabasz = {between / within * static_cast<double>(n - static_cast<std::size_t>(k)) /
                                 static_cast<double>(k - 1),
                             true};
  return out;
}

CentroidDistances centroid_distance_features(const Matrix& centroids) {
  CentroidDistances out{Scored::undefined(), Scored::undefined(), Scored::undefined(), Scored::undefined(),
                        Scored::undefined()};
  const std::size_t k = centroids.rows();
  if (k < 2) return out;
  const std::size_t d = centroids.cols();
  double cos_sum = 0.0, eu = 0.0, mk = 0.0, mh = 0.0, ham = 0.0;
  bool cos_ok = true;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto a = centroids.row(i);
      const auto b = centroids.row(j);
      const bool a_zero = std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; });
      const bool b_zero = std::all_of(b.begin(), b.end(), [](double x) { return x == 0.0; });
      if (a_zero || b_zero) cos_ok = false;
      else cos_sum += kernels::distance(kernels::Metric::cosine, a, b);
      eu += kernels::distance(kernels::Metric::euclidean, a, b);
      mk += kernels::distance(kernels::Metric::minkowski_p3, a, b);
      mh += kernels::distance(kernels::Metric::manhattan, a, b);
      double mismatches = 0.0;
      for (std::size_t t = 0; t < d; ++t) mismatches += ((a[t] > 0.0) != (b[t] > 0.0)) ? 1.0 : 0.0;
      ham += d > 0 ? mismatches / static_cast<double>(d) : 0.0;
    }
  }
  const double pairs = static_cast<double>(k * (k - 1) / 2);
  if (cos_ok) out.cosine = {cos_sum / pairs, true};
  out.euclidean = {eu / pairs, true};
  out.minkowski_p3 = {mk / pairs, true};
  out.manhattan = {mh / pairs, true};
  out.hamming = {ham / pairs, true};
  return out;
}

namespace {

// Solves f(x) = target for monotone f on [lo, hi]; targets outside the
// range of f are clamped to the nearer end.
template <typename F>
double solve_monotone(F f, double target, double lo, double hi) {
  const double f_lo = f(lo), f_hi = f(hi);
  if ((target - f_lo) * (f_hi - f_lo) <= 0.0) return lo;
  if ((target - f_hi) * (f_lo - f_hi) <= 0.0) return hi;
  boost::math::tools::eps_tolerance<double> tol(48);
  std::uintmax_t iterations = 100;
  const auto [a, b] = boost::math::tools::toms748_solve([&](double x) { return f(x) - target; }, lo, hi, tol, iterations);
  return 0.5 * (a + b);
}

}  // namespace

PmfFeatures pmf_features(std::span<const int> pred) {
  PmfFeatures out{Scored::undefined(), Scored::undefined(), Scored::undefined(), Scored::undefined(),
                  Scored::undefined(), Scored::undefined(), Scored::undefined()};
  if (pred.empty()) return out;
  std::vector<double> sizes;
  for (long long c : label_counts(pred))
    if (c > 0) sizes.push_back(static_cast<double>(c));
  if (sizes.size() < 2) return out;

  const double n = static_cast<double>(pred.size());
  const double k = static_cast<double>(sizes.size());
  const double mean = std::accumulate(sizes.begin(), sizes.end(), 0.0) / k;
  double var = 0.0;
  for (double s : sizes) var += (s - mean) * (s - mean);
  var /= k;

  // most frequent size value, smallest on ties
  std::map<double, int> freq;
  for (double s : sizes) ++freq[s];
  double mode = 0.0;
  int best = 0;
  for (const auto& [value, count] : freq)
    if (count > best) {
      best = count;
      mode = value;
    }

  // Bernoulli: membership of the largest cluster
  {
    const double p = *std::max_element(sizes.begin(), sizes.end()) / n;
    out.bernoulli = {std::max(p, 1.0 - p), true};
  }
  // discrete Laplace centred on the rounded mean
  {
    const double loc = std::round(mean);
    double pmf;
    if (var == 0.0) {
      pmf = mode == loc ? 1.0 : 0.0;
    } else {
      const double q = ((var + 1.0) - std::sqrt(2.0 * var + 1.0)) / var;
      const double a = -std::log(q);
      pmf = std::tanh(a / 2.0) * std::exp(-a * std::abs(mode - loc));
    }
    out.laplacian = {pmf, true};
  }
  // Poisson
  out.poisson = {std::exp(mode * std::log(mean) - mean - std::lgamma(mode + 1.0)), true};
  // Planck (geometric on 0, 1, ...)
  {
    const double lambda = std::log1p(1.0 / mean);
    out.planck = {-std::expm1(-lambda) * std::exp(-lambda * mode), true};
  }
  // Zeta / Zipf on 1, 2, ...
  if (mean <= 1.0) {
    out.zeta = {mode == 1.0 ? 1.0 : 0.0, true};
  } else {
    const auto zipf_mean = [](double s) { return boost::math::zeta(s - 1.0) / boost::math::zeta(s); };
    const double s = solve_monotone(zipf_mean, mean, 2.0 + 1e-9, 60.0);
    out.zeta = {std::exp(-s * std::log(mode)) / boost::math::zeta(s), true};
  }
  // logarithmic series on 1, 2, ...
  if (mean <= 1.0) {
    out.logarithmic_series = {mode == 1.0 ? 1.0 : 0.0, true};
  } else {
    const auto logser_mean = [](double p) { return -p / ((1.0 - p) * std::log1p(-p)); };
    const double p = solve_monotone(logser_mean, mean, 1e-12, 1.0 - 1e-15);
    out.logarithmic_series = {-std::exp(mode * std::log(p)) / (mode * std::log1p(-p)), true};
  }
  // Yule-Simon on 1, 2, ...
  if (mean <= 1.0) {
    out.yule_simon = {mode == 1.0 ? 1.0 : 0.0, true};
  } else {
    const double alpha = mean / (mean - 1.0);
    const double log_beta = std::lgamma(mode) + std::lgamma(alpha + 1.0) - std::lgamma(mode + alpha + 1.0);
    out.yule_simon = {alpha * std::exp(log_beta), true};
  }

  for (Scored* s : {&out.bernoulli, &out.laplacian, &out.zeta, &out.poisson, &out.planck, &out.logarithmic_series,
                    &out.yule_simon})
    if (!std::isfinite(s->value)) *s = Scored::undefined();
  return out;
}

}  // namespace onmar::metrics
