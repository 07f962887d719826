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
#include <set>

#include "doctest.h"
#include "onmar/clusterapp.hpp"
#include "onmar/metafeatures.hpp"
#include "oracles.hpp"

using namespace onmar;
using namespace onmar::ela;

namespace {

LandscapeSample line_sample(const std::vector<double>& x, const std::vector<double>& y) {
  LandscapeSample s;
  s.xs = Matrix(0, 1);
  for (double v : x) s.xs.push_row(std::vector<double>{v});
  s.ys = y;
  s.bounds = {{*std::min_element(x.begin(), x.end()), *std::max_element(x.begin(), x.end())}};
  return s;
}

LabeledDataset counts_dataset(const std::vector<std::size_t>& counts) {
  LabeledDataset d;
  d.features = Matrix(0, 1);
  for (std::size_t c = 0; c < counts.size(); ++c)
    for (std::size_t i = 0; i < counts[c]; ++i) {
      d.features.push_row(std::vector<double>{static_cast<double>(i)});
      d.labels.push_back(static_cast<int>(c));
    }
  return d;
}

void check_strata(const Matrix& pts, const Bounds& b) {
  const std::size_t n = pts.rows();
  for (std::size_t f = 0; f < b.size(); ++f) {
    std::vector<int> occ(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (pts(i, f) - b[f].first) / (b[f].second - b[f].first);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      ++occ[static_cast<std::size_t>(std::floor(u * static_cast<double>(n)))];
    }
    for (int o : occ) REQUIRE(o == 1);
  }
}

}  // namespace

TEST_CASE("latin hypercube: one sample per stratum") {
  Rng rng(1);
  check_strata(latin_hypercube_sample(4, {{0, 1}, {0, 1}}, rng), {{0, 1}, {0, 1}});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r(seed);
    const Bounds b{{-3, 2}, {0, 10}, {5, 6}};
    check_strata(latin_hypercube_sample(100, b, r), b);
  }
  const Matrix one = latin_hypercube_sample(1, {{2, 3}}, rng);
  CHECK(one(0, 0) >= 2.0);
  CHECK(one(0, 0) < 3.0);
  CHECK_THROWS(latin_hypercube_sample(4, {{1, 1}}, rng));
  CHECK_THROWS(latin_hypercube_sample(0, {{0, 1}}, rng));
}

TEST_CASE("y distribution") {
  const auto sym = y_distribution(std::vector<double>{1, 2, 3, 4, 5});
  CHECK(sym.skewness == doctest::Approx(0.0));

  const auto flat = y_distribution(std::vector<double>{0.3, 0.3, 0.3, 0.3});
  CHECK(flat.skewness == 0.0);
  CHECK(flat.kurtosis == 0.0);
  CHECK(flat.n_peaks == 1);

  const std::vector<double> clumps{0, 0.01, 0.02, 1, 1.01, 1.02};
  CHECK(oracle::kde_peaks(clumps, silverman_bandwidth(clumps)) == 2);
  CHECK(y_distribution(clumps).n_peaks == 2);
}

TEST_CASE("skewness: shift invariance, sign flip and agreement with the oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y(30), shifted(30), flipped(30);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = std::exp(standard_normal(rng));
      shifted[i] = y[i] + 7.0;
      flipped[i] = -y[i];
    }
    const double s = y_distribution(y).skewness;
    CHECK(s == doctest::Approx(oracle::biased_skewness(y)));
    CHECK(y_distribution(shifted).skewness == doctest::Approx(s));
    CHECK(y_distribution(flipped).skewness == doctest::Approx(-s));
  }
}

TEST_CASE("KDE peak count agrees with a dense-grid oracle") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> y(20);
    for (auto& v : y) v = uniform01(rng) < 0.5 ? 0.2 * standard_normal(rng) : 3.0 + 0.2 * standard_normal(rng);
    CHECK(kde_peak_count(y) == oracle::kde_peaks(y, silverman_bandwidth(y)));
  }
}

TEST_CASE("meta model") {
  const auto lin = meta_model(line_sample({0, 1, 2, 3, 4}, {0, 2, 4, 6, 8}));
  CHECK(lin.r2_lin_adj.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lin.lin_coef_min.value == doctest::Approx(2.0));
  CHECK(lin.lin_coef_max.value == doctest::Approx(2.0));

  const auto flat = meta_model(line_sample({0, 1, 2, 3, 4}, {1, 1, 1, 1, 1}));
  CHECK(flat.r2_lin_adj.value == 0.0);

  // plain R^2 of the linear fit is 0 here; the adjusted value is 1 - 4/3
  const auto quad = meta_model(line_sample({-2, -1, 0, 1, 2}, {4, 1, 0, 1, 4}));
  CHECK(quad.r2_quad_adj.value == doctest::Approx(1.0));
  CHECK(quad.r2_lin_adj.value == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("meta model: exact linear landscapes and coefficient scaling") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    LandscapeSample s;
    s.xs = latin_hypercube_sample(30, {{0, 1}, {0, 1}, {0, 1}}, rng);
    const double w[3] = {standard_normal(rng), standard_normal(rng), standard_normal(rng)};
    for (std::size_t i = 0; i < 30; ++i) s.ys.push_back(0.5 + w[0] * s.xs(i, 0) + w[1] * s.xs(i, 1) + w[2] * s.xs(i, 2));
    const auto m = meta_model(s);
    CHECK(std::abs(m.r2_lin_adj.value - 1.0) < 1e-9);
    LandscapeSample scaled = s;
    for (auto& y : scaled.ys) y *= 3.0;
    const auto ms = meta_model(scaled);
    CHECK(ms.lin_coef_min.value == doctest::Approx(3.0 * m.lin_coef_min.value));
    CHECK(ms.lin_coef_max.value == doctest::Approx(3.0 * m.lin_coef_max.value));
  }
}

TEST_CASE("dispersion") {
  LandscapeSample same = line_sample({1, 1, 1, 1, 1, 1}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  same.bounds = {{0, 2}};
  for (std::size_t q = 0; q < 4; ++q) {
    if (!dispersion(same).ratio[q].valid) continue;
    CHECK(dispersion(same).ratio[q].value == 1.0);
    CHECK(dispersion(same).diff[q].value == 0.0);
  }

  const auto flat = dispersion(line_sample({0, 1, 2, 3, 4, 5}, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}));
  for (std::size_t q = 0; q < 4; ++q) {
    CHECK(flat.ratio[q].value == doctest::Approx(1.0));
    CHECK(flat.diff[q].value == doctest::Approx(0.0));
  }

  // 20 points: the five best share one location and one (tied) value
  std::vector<double> x, y;
  for (int i = 0; i < 5; ++i) {
    x.push_back(10.0);
    y.push_back(1.0);
  }
  for (int i = 0; i < 15; ++i) {
    x.push_back(static_cast<double>(i) * 3.0);
    y.push_back(0.05 * i / 15.0);
  }
  const auto d = dispersion(line_sample(x, y));
  for (std::size_t q = 0; q < 4; ++q) {
    REQUIRE(d.ratio[q].valid);
    CHECK(d.ratio[q].value < 1.0);
  }
}

TEST_CASE("information content") {
  const std::vector<double> rising{0.1, 0.2, 0.4, 0.7, 0.8};
  std::vector<double> diffs;
  for (std::size_t i = 1; i < rising.size(); ++i) diffs.push_back(rising[i] - rising[i - 1]);
  const auto sym = ic_symbols(diffs, 0.0);
  CHECK(std::all_of(sym.begin(), sym.end(), [](int s) { return s == 1; }));
  CHECK(ic_entropy(sym) == 0.0);

  CHECK(information_content(line_sample({0, 1, 2, 3, 4}, {0.3, 0.3, 0.3, 0.3, 0.3})).h_max == 0.0);

  // alternating values along a 1-d tour: symbol pairs (+1,-1) and (-1,+1)
  // each make up half of the four pairs, so entropy = log_6(2)
  const std::vector<double> alt{0, 1, 0, 1, 0, 1};
  std::vector<double> ad;
  for (std::size_t i = 1; i < alt.size(); ++i) ad.push_back(alt[i] - alt[i - 1]);
  const auto as = ic_symbols(ad, 0.5);
  CHECK(as == std::vector<int>{1, -1, 1, -1, 1});
  CHECK(ic_entropy(as) == doctest::Approx(0.3868528072345416));

  // equal steps: every epsilon maps all differences to the same symbol
  const auto steps = information_content(line_sample({0, 1, 2, 3, 4, 5}, {0, 0.2, 0.4, 0.6, 0.8, 1.0}));
  CHECK(steps.h_max == doctest::Approx(0.0));
}

TEST_CASE("information content: monotone Y has zero entropy at epsilon 0") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(12), y(12);
    double acc = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
      x[i] = static_cast<double>(i);
      acc += 0.01 + uniform01(rng);
      y[i] = acc;
    }
    const auto s = line_sample(x, y);
    const auto tour = nearest_neighbour_tour(s.xs);
    std::vector<double> d;
    for (std::size_t i = 1; i < tour.size(); ++i) d.push_back(s.ys[tour[i]] - s.ys[tour[i - 1]]);
    CHECK(ic_entropy(ic_symbols(d, 0.0)) == 0.0);
  }
}

TEST_CASE("epsilon grid") {
  const auto g = ic_epsilon_grid(2.0);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(2.0));
  CHECK(std::is_sorted(g.begin(), g.end()));
}

TEST_CASE("nearest-better clustering: three colinear points") {
  const auto s = line_sample({0, 1, 2}, {0.1, 0.2, 0.3});
  const auto nd = neighbour_distances(s);
  CHECK(nd.nearest == std::vector<double>{1, 1, 1});
  CHECK(nd.nearest_better == std::vector<double>{1, 1, 2});
  const auto f = nbc(s);
  CHECK(f.mean_ratio.value == doctest::Approx(4.0 / 3.0));

  const auto flat = nbc(line_sample({0, 1, 2}, {0.5, 0.5, 0.5}));
  CHECK_FALSE(flat.sd_ratio.valid);
  CHECK_FALSE(flat.mean_ratio.valid);
  CHECK_FALSE(flat.dist_correlation.valid);
  CHECK_FALSE(flat.cv_ratio.valid);
  CHECK_FALSE(flat.indegree_cv.valid);
}

TEST_CASE("nearest-better distance is at least the nearest distance") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    LandscapeSample s;
    s.xs = latin_hypercube_sample(25, {{0, 1}, {0, 1}}, rng);
    for (std::size_t i = 0; i < 25; ++i) s.ys.push_back(uniform01(rng));
    const auto nd = neighbour_distances(s);
    for (std::size_t i = 0; i < 25; ++i) CHECK(nd.nearest_better[i] >= nd.nearest[i]);
  }
}

TEST_CASE("equidistant simplex points share one nearest distance") {
  LandscapeSample s;
  s.xs = Matrix(0, 3);
  s.xs.push_row(std::vector<double>{1, 0, 0});
  s.xs.push_row(std::vector<double>{0, 1, 0});
  s.xs.push_row(std::vector<double>{0, 0, 1});
  s.ys = {0.1, 0.5, 0.9};
  const auto nd = neighbour_distances(s);
  CHECK(nd.nearest[0] == doctest::Approx(nd.nearest[1]));
  CHECK(nd.nearest[1] == doctest::Approx(nd.nearest[2]));
}

TEST_CASE("dataset stats") {
  const auto balanced = dataset_stats(counts_dataset({50, 50}));
  CHECK(balanced.imbalance == 0.0);
  CHECK(balanced.classes == 2);
  CHECK(balanced.instances == 100);
  CHECK(dataset_stats(counts_dataset({75, 25})).imbalance == doctest::Approx(0.5));
  const auto single = dataset_stats(counts_dataset({7}));
  CHECK(single.classes == 1);
  CHECK(single.imbalance == 0.0);
}

TEST_CASE("landscape construction") {
  Rng rng(2);
  const LabeledDataset blobs = generate_blobs(60, 2, 2, 20.0, rng);
  const auto s = build_landscape(blobs, 2, kernels::Metric::euclidean, 16, rng);
  CHECK(s.xs.rows() == 16);
  CHECK(s.xs.cols() == 4);
  CHECK(s.ys.size() == 16);
  for (double y : s.ys) {
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
  }

  // a single centroid maps everything to one cluster
  const LabeledDataset skew = counts_dataset({30, 10});
  for (double y : build_landscape(skew, 1, kernels::Metric::euclidean, 8, rng).ys) CHECK(y == doctest::Approx(0.75));

  // the true class means outscore every sampled centroid set
  Matrix samples = s.xs;
  std::vector<double> means(4, 0.0);
  for (std::size_t i = 0; i < blobs.size(); ++i)
    for (std::size_t f = 0; f < 2; ++f) means[static_cast<std::size_t>(blobs.labels[i]) * 2 + f] += blobs.features(i, f) / 30.0;
  samples.push_row(means);
  const auto acc = kernels::landscape_accuracies(blobs.features, blobs.labels, samples, 2, kernels::Metric::euclidean);
  CHECK(acc.back() == *std::max_element(acc.begin(), acc.end()));
  CHECK(acc.back() == 1.0);
}

TEST_CASE("extractor output is finite and follows a fixed schema") {
  Rng rng(8);
  const LabeledDataset data = generate_blobs(80, 3, 3, 6.0, rng);
  ClusterApp app;
  app.reset(data, 5);
  MetaFeatureExtractor ex({32, 99});
  const auto names = ex.schema(app);
  const auto before = ex.extract(app, 0);
  CHECK(before.size() == names.size());
  CHECK_FALSE(before.is_valid("clu.accuracy"));
  app.exec(encode_design({kernels::Metric::euclidean, InitRule::sample_points, AssignRule::hard_nearest,
                          UpdateRule::mean, 3, 0.1}),
           0);
  const auto after = ex.extract(app, 1);
  CHECK(*after.names == names);
  CHECK(after.is_valid("clu.accuracy"));
  CHECK(after.at("timestep") == 1.0);
  CHECK(after.at("classes") == 3.0);
  CHECK(after.at("instances") == 80.0);
  for (double v : after.values) CHECK(std::isfinite(v));
  std::set<std::string> unique(names.begin(), names.end());
  CHECK(unique.size() == names.size());
  CHECK(ex.extract(app, 1).values == after.values);
}
