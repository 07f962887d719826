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
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "onmar/metafeatures.hpp"

namespace onmar::ela {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1 denominator).
double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Linear-interpolation quantile (R type 7 / numpy default).
double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

bool all_equal(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double euclid(std::span<const double> a, std::span<const double> b) {
  return kernels::distance(kernels::Metric::euclidean, a, b);
}

Scored checked(double v) { return std::isfinite(v) ? Scored{v, true} : Scored::undefined(); }

double pearson(std::span<const double> a, std::span<const double> b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

// ---------------------------------------------------------------- y-distribution

double silverman_bandwidth(std::span<const double> ys) {
  const double n = static_cast<double>(ys.size());
  const double sd = sd_of(ys);
  const std::vector<double> v(ys.begin(), ys.end());
  const double iqr = (quantile(v, 0.75) - quantile(v, 0.25)) / 1.34;
  double spread = std::min(sd, iqr);
  if (spread <= 0.0) spread = std::max(sd, iqr);
  return 0.9 * spread * std::pow(n, -0.2);
}

int kde_peak_count(std::span<const double> ys) {
  if (ys.empty() || all_equal(ys)) return 1;
  const double h = silverman_bandwidth(ys);
  if (!(h > 0.0)) return 1;
  constexpr std::size_t grid = 512;
  const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  const double lo = *mn - 3.0 * h;
  const double hi = *mx + 3.0 * h;
  std::vector<double> density(grid, 0.0);
  for (std::size_t g = 0; g < grid; ++g) {
    const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid - 1);
    for (double y : ys) {
      const double z = (x - y) / h;
      density[g] += std::exp(-0.5 * z * z);
    }
  }
  int peaks = 0;
  for (std::size_t g = 1; g + 1 < grid; ++g)
    if (density[g] > density[g - 1] && density[g] >= density[g + 1]) ++peaks;
  return std::max(peaks, 1);
}

YDistribution y_distribution(std::span<const double> ys) {
  YDistribution out;
  if (ys.size() < 3) throw std::invalid_argument("y_distribution needs at least three values");
  if (all_equal(ys)) return out;
  const double n = static_cast<double>(ys.size());
  const double m = mean_of(ys);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double y : ys) {
    const double t = y - m;
    m2 += t * t;
    m3 += t * t * t;
    m4 += t * t * t * t;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  out.skewness = m3 / std::pow(m2, 1.5);
  out.kurtosis = m4 / (m2 * m2) - 3.0;
  out.n_peaks = kde_peak_count(ys);
  return out;
}

// ---------------------------------------------------------------- meta-model

namespace {

struct FitResult {
  Scored r2_adj;
  Scored coef_min;
  Scored coef_max;
  bool rank_deficient = false;
};

FitResult fit_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  FitResult out;
  const auto n = static_cast<double>(design.rows());
  const auto p = static_cast<double>(design.cols() - 1);  // excluding intercept
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd coef = cod.solve(y);
  out.rank_deficient = cod.rank() < design.cols();

  if (design.cols() > 1) {
    const auto slopes = coef.tail(design.cols() - 1);
    out.coef_min = checked(slopes.minCoeff());
    out.coef_max = checked(slopes.maxCoeff());
  } else {
    out.coef_min = out.coef_max = Scored::undefined();
  }

  const double ybar = y.mean();
  const double ss_tot = (y.array() - ybar).square().sum();
  if (ss_tot == 0.0) {
    out.r2_adj = {0.0, true};
    return out;
  }
  const double ss_res = (y - design * coef).squaredNorm();
  const double r2 = 1.0 - ss_res / ss_tot;
  if (n - p - 1.0 <= 0.0) {
    out.r2_adj = Scored::undefined();
  } else {
    out.r2_adj = checked(1.0 - (1.0 - r2) * (n - 1.0) / (n - p - 1.0));
  }
  return out;
}

}  // namespace

MetaModel meta_model(const LandscapeSample& sample) {
  const auto n = static_cast<Eigen::Index>(sample.xs.rows());
  const auto d = static_cast<Eigen::Index>(sample.xs.cols());
  if (n < 2 || sample.ys.size() != sample.xs.rows()) throw std::invalid_argument("meta_model: bad sample");
  Eigen::VectorXd y(n);
  Eigen::MatrixXd lin(n, d + 1), quad(n, 2 * d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = sample.ys[static_cast<std::size_t>(i)];
    lin(i, 0) = quad(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double x = sample.xs(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      lin(i, j + 1) = x;
      quad(i, j + 1) = x;
      quad(i, d + j + 1) = x * x;
    }
  }
  const FitResult l = fit_least_squares(lin, y);
  const FitResult q = fit_least_squares(quad, y);
  MetaModel out;
  out.r2_lin_adj = l.r2_adj;
  out.lin_coef_min = l.coef_min;
  out.lin_coef_max = l.coef_max;
  out.lin_rank_deficient = l.rank_deficient;
  out.r2_quad_adj = q.r2_adj;
  out.quad_coef_min = q.coef_min;
  out.quad_coef_max = q.coef_max;
  out.quad_rank_deficient = q.rank_deficient;
  return out;
}

// ---------------------------------------------------------------- dispersion

Dispersion dispersion(const LandscapeSample& sample) {
  const std::size_t n = sample.xs.rows();
  Dispersion out;
  out.ratio.fill(Scored::undefined());
  out.diff.fill(Scored::undefined());
  if (n < 2) return out;

  const auto mean_pairwise = [&](const std::vector<std::size_t>& idx) {
    double s = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b, ++pairs) s += euclid(sample.xs.row(idx[a]), sample.xs.row(idx[b]));
    return s / static_cast<double>(pairs);
  };

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const double d_all = mean_pairwise(all);

  for (std::size_t qi = 0; qi < kDispersionQuantiles.size(); ++qi) {
    const double threshold = quantile(sample.ys, 1.0 - kDispersionQuantiles[qi]);
    std::vector<std::size_t> best;
    for (std::size_t i = 0; i < n; ++i)
      if (sample.ys[i] >= threshold) best.push_back(i);
    if (best.size() < 2) continue;
    const double d_best = mean_pairwise(best);
    out.ratio[qi] = d_all == 0.0 ? Scored{d_best == 0.0 ? 1.0 : 0.0, d_best == 0.0} : checked(d_best / d_all);
    out.diff[qi] = checked(d_best - d_all);
  }
  return out;
}

// ---------------------------------------------------------------- information content

std::vector<std::size_t> nearest_neighbour_tour(const Matrix& xs) {
  const std::size_t n = xs.rows();
  std::vector<std::size_t> tour;
  if (n == 0) return tour;
  tour.reserve(n);
  std::vector<char> visited(n, 0);
  std::size_t cur = 0;
  visited[0] = 1;
  tour.push_back(0);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (visited[j]) continue;
      const double dj = euclid(xs.row(cur), xs.row(j));
      if (dj < best) {
        best = dj;
        next = j;
      }
    }
    visited[next] = 1;
    tour.push_back(next);
    cur = next;
  }
  return tour;
}

std::vector<int> ic_symbols(std::span<const double> diffs, double eps) {
  std::vector<int> out(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) out[i] = diffs[i] > eps ? 1 : (diffs[i] < -eps ? -1 : 0);
  return out;
}

double ic_entropy(std::span<const int> symbols) {
  if (symbols.size() < 2) return 0.0;
  // counts[a+1][b+1] for the ordered pair (a, b)
  double counts[3][3] = {};
  for (std::size_t i = 0; i + 1 < symbols.size(); ++i) counts[symbols[i] + 1][symbols[i + 1] + 1] += 1.0;
  const double total = static_cast<double>(symbols.size() - 1);
  double h = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b && counts[a][b] > 0.0) {
        const double p = counts[a][b] / total;
        h -= p * std::log(p) / std::log(6.0);
      }
  return h;
}

double ic_partial_information(std::span<const int> symbols) {
  if (symbols.empty()) return 0.0;
  std::size_t mu = 0;
  int last = 0;
  for (int s : symbols) {
    if (s == 0 || s == last) continue;
    ++mu;
    last = s;
  }
  return static_cast<double>(mu) / static_cast<double>(symbols.size());
}

std::vector<double> ic_epsilon_grid(double y_range) {
  std::vector<double> grid{0.0};
  if (!(y_range > 0.0)) return grid;
  constexpr int steps = 32;
  const double lo = std::log10(std::min(1e-6, y_range));
  const double hi = std::log10(y_range);
  for (int i = 0; i < steps; ++i) grid.push_back(std::pow(10.0, lo + (hi - lo) * i / (steps - 1)));
  grid.back() = y_range;
  return grid;
}

InformationContent information_content(const LandscapeSample& sample) {
  const std::size_t n = sample.xs.rows();
  if (n < 3) throw std::invalid_argument("information_content needs at least three points");
  InformationContent out;
  const auto [mn, mx] = std::minmax_element(sample.ys.begin(), sample.ys.end());
  const double range = *mx - *mn;
  if (range == 0.0) return out;

  const auto tour = nearest_neighbour_tour(sample.xs);
  std::vector<double> diffs(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) diffs[i] = sample.ys[tour[i + 1]] - sample.ys[tour[i]];

  const auto grid = ic_epsilon_grid(range);
  std::vector<double> h(grid.size()), m(grid.size());
  bool settled = false;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto sym = ic_symbols(diffs, grid[g]);
    h[g] = ic_entropy(sym);
    m[g] = ic_partial_information(sym);
    if (!settled && std::all_of(sym.begin(), sym.end(), [](int s) { return s == 0; })) {
      settled = true;
      out.settling_sensitivity = grid[g];
    }
  }
  const auto hmax = std::max_element(h.begin(), h.end());
  out.h_max = *hmax;
  out.eps_s = grid[static_cast<std::size_t>(hmax - h.begin())];
  out.initial_partial_information = m.front();
  for (std::size_t g = 0; g < grid.size(); ++g)
    if (m[g] > 0.5 * m.front()) out.m0_ratio = grid[g];
  return out;
}

// ---------------------------------------------------------------- nearest-better clustering

NeighbourDistances neighbour_distances(const LandscapeSample& sample) {
  const std::size_t n = sample.xs.rows();
  NeighbourDistances out;
  out.nearest.assign(n, std::numeric_limits<double>::infinity());
  out.nearest_better.assign(n, std::numeric_limits<double>::infinity());
  out.indegree.assign(n, 0);
  double max_pair = 0.0;
  std::vector<int> better_of(n, -1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dij = euclid(sample.xs.row(i), sample.xs.row(j));
      max_pair = std::max(max_pair, dij);
      out.nearest[i] = std::min(out.nearest[i], dij);
      if (sample.ys[j] > sample.ys[i] && dij < out.nearest_better[i]) {
        out.nearest_better[i] = dij;
        better_of[i] = static_cast<int>(j);
      }
    }
  for (std::size_t i = 0; i < n; ++i) {
    if (better_of[i] < 0) out.nearest_better[i] = max_pair;
    else ++out.indegree[static_cast<std::size_t>(better_of[i])];
  }
  return out;
}

Nbc nbc(const LandscapeSample& sample) {
  Nbc out{Scored::undefined(), Scored::undefined(), Scored::undefined(), Scored::undefined(), Scored::undefined()};
  const std::size_t n = sample.xs.rows();
  if (n < 3 || all_equal(sample.ys)) return out;
  const auto nd = neighbour_distances(sample);
  const double sd_nn = sd_of(nd.nearest), sd_nb = sd_of(nd.nearest_better);
  const double mean_nn = mean_of(nd.nearest), mean_nb = mean_of(nd.nearest_better);
  if (sd_nn > 0.0) out.sd_ratio = checked(sd_nb / sd_nn);
  if (mean_nn > 0.0) out.mean_ratio = checked(mean_nb / mean_nn);
  out.dist_correlation = checked(pearson(nd.nearest, nd.nearest_better));

  if (std::all_of(nd.nearest.begin(), nd.nearest.end(), [](double x) { return x > 0.0; })) {
    std::vector<double> ratio(n);
    for (std::size_t i = 0; i < n; ++i) ratio[i] = nd.nearest_better[i] / nd.nearest[i];
    out.cv_ratio = checked(sd_of(ratio) / mean_of(ratio));
  }
  std::vector<double> indeg(nd.indegree.begin(), nd.indegree.end());
  const double mean_in = mean_of(indeg);
  if (mean_in > 0.0) out.indegree_cv = checked(sd_of(indeg) / mean_in);
  return out;
}

// ---------------------------------------------------------------- dataset + landscape

DatasetStats dataset_stats(const LabeledDataset& data) {
  if (data.size() == 0) throw std::invalid_argument("dataset_stats: empty dataset");
  DatasetStats s;
  std::vector<std::size_t> counts = data.class_counts();
  std::erase(counts, std::size_t{0});
  s.classes = static_cast<int>(counts.size());
  s.instances = data.size();
  const auto [mn, mx] = std::minmax_element(counts.begin(), counts.end());
  s.imbalance = static_cast<double>(*mx - *mn) / static_cast<double>(s.instances);
  return s;
}

Bounds feature_bounds(const LabeledDataset& data) {
  Bounds b(data.dims(), {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < data.dims(); ++j) {
      b[j].first = std::min(b[j].first, data.features(i, j));
      b[j].second = std::max(b[j].second, data.features(i, j));
    }
  for (auto& [lo, hi] : b)
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
  return b;
}

LandscapeSample build_landscape(const LabeledDataset& data, int k, kernels::Metric metric, std::size_t n_samples,
                                Rng& rng, kernels::Exec exec) {
  if (k < 1) throw std::invalid_argument("build_landscape: k must be positive");
  const Bounds per_dim = feature_bounds(data);
  Bounds bounds;
  bounds.reserve(per_dim.size() * static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) bounds.insert(bounds.end(), per_dim.begin(), per_dim.end());
  LandscapeSample s;
  s.xs = latin_hypercube_sample(n_samples, bounds, rng);
  s.ys = kernels::landscape_accuracies(data.features, data.labels, s.xs, k, metric, exec);
  s.bounds = std::move(bounds);
  return s;
}

void append_landscape_features(const LandscapeSample& sample, FeatureBlock& out) {
  const auto yd = y_distribution(sample.ys);
  out.add("ela_distr.skewness", yd.skewness);
  out.add("ela_distr.kurtosis", yd.kurtosis);
  out.add("ela_distr.number_of_peaks", yd.n_peaks);

  const auto mm = meta_model(sample);
  out.add("ela_meta.lin_simple.adj_r2", mm.r2_lin_adj);
  out.add("ela_meta.lin_simple.coef.min", mm.lin_coef_min);
  out.add("ela_meta.lin_simple.coef.max", mm.lin_coef_max);
  out.add("ela_meta.quad_simple.adj_r2", mm.r2_quad_adj);
  out.add("ela_meta.quad_simple.coef.min", mm.quad_coef_min);
  out.add("ela_meta.quad_simple.coef.max", mm.quad_coef_max);

  const auto disp = dispersion(sample);
  static constexpr const char* tags[] = {"02", "05", "10", "25"};
  for (std::size_t q = 0; q < kDispersionQuantiles.size(); ++q)
    out.add(std::string("disp.ratio_mean_") + tags[q], disp.ratio[q]);
  for (std::size_t q = 0; q < kDispersionQuantiles.size(); ++q)
    out.add(std::string("disp.diff_mean_") + tags[q], disp.diff[q]);

  const auto ic = information_content(sample);
  out.add("ic.h_max", ic.h_max);
  out.add("ic.settling_sensitivity", ic.settling_sensitivity);
  out.add("ic.eps_s", ic.eps_s);
  out.add("ic.m0_ratio", ic.m0_ratio);
  out.add("ic.m0", ic.initial_partial_information);

  const auto nb = nbc(sample);
  out.add("nbc.nb_nn.sd_ratio", nb.sd_ratio);
  out.add("nbc.nb_nn.mean_ratio", nb.mean_ratio);
  out.add("nbc.nn_nb.cor", nb.dist_correlation);
  out.add("nbc.dist_ratio.coeff_var", nb.cv_ratio);
  out.add("nbc.indegree.coeff_var", nb.indegree_cv);
}

}  // namespace onmar::ela
