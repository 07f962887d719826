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
#include <memory>
#include <set>

#include "doctest.h"
#include "onmar/metalearners.hpp"
#include "oracles.hpp"

using namespace onmar;
using namespace onmar::ml;

namespace {

TrainingMatrix regression(const Matrix& x, std::vector<double> y) {
  TrainingMatrix t;
  t.features = x;
  t.targets = std::move(y);
  return t;
}

TrainingMatrix random_regression(Rng& rng, std::size_t n, std::size_t w) {
  Matrix x(n, w);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < w; ++j) x(i, j) = uniform_real(rng, -2.0, 2.0);
    y[i] = std::sin(x(i, 0)) + 0.3 * x(i, w - 1) * x(i, w - 1) + 0.05 * standard_normal(rng);
  }
  return regression(x, y);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

GeneSchema two_gene_schema() {
  return GeneSchema("ml-test", {{"shape", CategoricalGene{{"a", "b", "c"}}}, {"size", NumericGene{0.0, 10.0, false}}});
}

MetaFeatureVector features(std::vector<double> v) {
  MetaFeatureVector m;
  auto names = std::make_shared<FeatureNames>();
  for (std::size_t i = 0; i < v.size(); ++i) names->push_back("f" + std::to_string(i));
  m.valid.assign(v.size(), 1);
  m.values = std::move(v);
  m.names = names;
  return m;
}

KnowledgeRepository design_repository() {
  const auto schema = two_gene_schema();
  const Design a{{0.0, 1.0}, schema.id()}, b{{2.0, 9.0}, schema.id()};
  KnowledgeRepository kr;
  for (int i = 0; i < 12; ++i) {
    const bool low = i % 2 == 0;
    kr.push_back({features({low ? -1.0 - 0.01 * i : 1.0 + 0.01 * i, 0.5}), low ? a : b, 0.9, i});
  }
  return kr;
}

}  // namespace

TEST_CASE("learner names") {
  CHECK(kind_from_string("knn") == Kind::knn);
  CHECK(kind_from_string("rf") == Kind::rf);
  CHECK(kind_from_string("gbt") == Kind::gbt);
  CHECK(kind_from_string("xgb") == Kind::gbt);
  CHECK(to_string(Kind::rf) == "rf");
  CHECK_THROWS(kind_from_string("svm"));
}

TEST_CASE("knn with k = 1 returns the matching training target") {
  Rng rng(1);
  const auto t = random_regression(rng, 30, 3);
  Hyper h;
  h.knn_k = 1;
  const auto m = fit(Kind::knn, Mode::regress_performance, t, h, 1);
  for (std::size_t i = 0; i < 30; ++i) CHECK(m.predict_value(t.features.row(i)) == t.targets[i]);
}

TEST_CASE("knn with k = 2 between two equidistant points averages them") {
  Matrix x(2, 1, std::vector<double>{0.0, 2.0});
  Hyper h;
  h.knn_k = 2;
  const auto m = fit(Kind::knn, Mode::regress_performance, regression(x, {0.0, 1.0}), h, 1);
  const std::vector<double> q{1.0};
  CHECK(m.predict_value(q) == doctest::Approx(0.5));
}

TEST_CASE("knn fitted on one row predicts that row's target everywhere") {
  Matrix x(1, 2, std::vector<double>{3.0, 4.0});
  const auto m = fit(Kind::knn, Mode::regress_performance, regression(x, {0.7}), Hyper{}, 1);
  CHECK(m.predict_value(std::vector<double>{-100.0, 5.0}) == 0.7);
}

TEST_CASE("knn matches a brute-force oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + uniform_index(rng, 40), w = 1 + uniform_index(rng, 5);
    auto t = random_regression(rng, n, w);
    // integer-valued features make exact distance ties common
    for (auto& v : t.features.data()) v = std::round(v);
    Hyper h;
    h.knn_k = 1 + uniform_index(rng, 7);
    const auto m = fit(Kind::knn, Mode::regress_performance, t, h, 1);
    std::vector<double> q(w);
    for (auto& v : q) v = std::round(uniform_real(rng, -2.0, 2.0));
    CHECK(m.predict_value(q) == oracle::knn_mean(t.features, t.targets, q, h.knn_k));
  }
}

TEST_CASE("boosting with zero rounds predicts the mean") {
  Rng rng(3);
  const auto t = random_regression(rng, 40, 2);
  Hyper h;
  h.gbt_rounds = 0;
  const auto m = fit(Kind::gbt, Mode::regress_performance, t, h, 1);
  CHECK(m.predict_value(t.features.row(5)) == doctest::Approx(mean_of(t.targets)));
}

TEST_CASE("boosting training error does not increase with rounds") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_regression(rng, 60, 3);
    Hyper h;
    h.gbt_rounds = 30;
    const auto m = fit(Kind::gbt, Mode::regress_performance, t, h, static_cast<std::uint64_t>(trial));
    const auto& booster = m.boosters.front();
    double prev = INFINITY;
    for (std::size_t r = 0; r <= h.gbt_rounds; ++r) {
      double mse = 0.0;
      for (std::size_t i = 0; i < t.features.rows(); ++i) {
        const double e = booster.predict(t.features.row(i), r) - t.targets[i];
        mse += e * e;
      }
      CHECK(mse <= prev + 1e-9);
      prev = mse;
    }
  }
}

TEST_CASE("fitted learners beat the mean predictor on their training data") {
  Rng rng(5);
  const auto t = random_regression(rng, 80, 2);
  const double mu = mean_of(t.targets);
  double base = 0.0;
  for (double y : t.targets) base += (y - mu) * (y - mu);
  for (Kind k : {Kind::gbt, Kind::rf}) {
    const auto m = fit(k, Mode::regress_performance, t, Hyper{}, 9);
    double mse = 0.0;
    for (std::size_t i = 0; i < t.features.rows(); ++i) {
      const double e = m.predict_value(t.features.row(i)) - t.targets[i];
      mse += e * e;
    }
    CHECK(mse <= base);
  }
}

TEST_CASE("forest of stumps of depth zero predicts near the mean") {
  Rng rng(6);
  const auto t = random_regression(rng, 200, 2);
  Hyper h;
  h.rf_max_depth = 0;
  h.rf_trees = 200;
  const auto m = fit(Kind::rf, Mode::regress_performance, t, h, 3);
  double sd = 0.0;
  const double mu = mean_of(t.targets);
  for (double y : t.targets) sd += (y - mu) * (y - mu);
  sd = std::sqrt(sd / 200.0);
  // average of 200 bootstrap means: standard error about sd / sqrt(200 * 200)
  CHECK(std::abs(m.predict_value(t.features.row(0)) - mu) < 5.0 * sd / 200.0);
}

TEST_CASE("forest predictions stay within the target range") {
  Rng rng(7);
  const auto t = random_regression(rng, 60, 3);
  const auto m = fit(Kind::rf, Mode::regress_performance, t, Hyper{}, 4);
  const auto [lo, hi] = std::minmax_element(t.targets.begin(), t.targets.end());
  for (int i = 0; i < 100; ++i) {
    std::vector<double> q{uniform_real(rng, -5, 5), uniform_real(rng, -5, 5), uniform_real(rng, -5, 5)};
    const double p = m.predict_value(q);
    CHECK(p >= *lo);
    CHECK(p <= *hi);
  }
}

TEST_CASE("forest class vote takes the majority") {
  MetaLearnerModel m;
  m.kind = Kind::rf;
  m.mode = Mode::predict_design;
  m.width = 1;
  m.designs = {Design{{0.0}, "x"}, Design{{1.0}, "x"}};
  for (int v : {0, 0, 0, 1, 1}) {
    Tree stub;
    stub.nodes.push_back(TreeNode{-1, 0.0, -1, -1, static_cast<double>(v)});
    m.forest.push_back(stub);
  }
  CHECK(m.predict_class(std::vector<double>{0.0}) == 0);
}

TEST_CASE("fits are deterministic per seed") {
  Rng rng(8);
  const auto t = random_regression(rng, 50, 3);
  for (Kind k : {Kind::knn, Kind::rf, Kind::gbt}) {
    const auto a = fit(k, Mode::regress_performance, t, Hyper{}, 11);
    const auto b = fit(k, Mode::regress_performance, t, Hyper{}, 11);
    CHECK(to_json(a) == to_json(b));
  }
}

TEST_CASE("design prediction returns a stored design and separates the classes") {
  const auto kr = design_repository();
  const auto t = design_matrix(kr);
  CHECK(t.designs.size() == 2);
  CHECK(t.classes.front() == 0);
  for (Kind k : {Kind::knn, Kind::rf, Kind::gbt}) {
    Hyper h;
    h.knn_k = 1;
    const auto m = fit(k, Mode::predict_design, t, h, 2);
    const Design low = predict_design(m, features({-1.05, 0.5}));
    const Design high = predict_design(m, features({1.05, 0.5}));
    CHECK(low == kr[0].design);
    CHECK(high == kr[1].design);
  }
}

TEST_CASE("regression matrix concatenates meta-features and encoded design") {
  const auto schema = two_gene_schema();
  const auto kr = design_repository();
  const auto t = regression_matrix(kr, schema);
  CHECK(t.features.cols() == 2 + schema.encoded_width());
  CHECK(t.features.rows() == kr.size());
  CHECK(t.features(1, 2 + 2) == 1.0);  // option "c" of entry 1
  CHECK(t.features(1, 2 + 3) == doctest::Approx(0.9));
}

TEST_CASE("predicted performance is clamped and checks width") {
  const auto schema = two_gene_schema();
  auto kr = design_repository();
  for (auto& e : kr) e.performance = 1.0;
  const auto m = fit(Kind::gbt, Mode::regress_performance, regression_matrix(kr, schema), Hyper{}, 1);
  const double p = predict_performance(m, features({0.0, 0.5}), kr[0].design, schema);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
  CHECK_THROWS(predict_performance(m, features({0.0}), kr[0].design, schema));
  CHECK_THROWS(m.predict_value(std::vector<double>{1.0}));
  CHECK_THROWS(predict_design(m, features({0.0, 0.5})));
}

TEST_CASE("empty or inconsistent training data is rejected") {
  CHECK_THROWS_AS(fit(Kind::knn, Mode::regress_performance, TrainingMatrix{}, Hyper{}, 1), std::invalid_argument);
  auto t = regression(Matrix(3, 1, 0.0), {1.0, 2.0});
  CHECK_THROWS_AS(fit(Kind::rf, Mode::regress_performance, t, Hyper{}, 1), std::invalid_argument);
}

TEST_CASE("models survive a JSON round trip") {
  Rng rng(9);
  const auto t = random_regression(rng, 40, 3);
  for (Kind k : {Kind::knn, Kind::rf, Kind::gbt}) {
    const auto m = fit(k, Mode::regress_performance, t, Hyper{}, 5);
    const auto back = model_from_json(to_json(m));
    for (std::size_t i = 0; i < 40; ++i) CHECK(back.predict_value(t.features.row(i)) == m.predict_value(t.features.row(i)));
  }
  const auto d = design_matrix(design_repository());
  for (Kind k : {Kind::knn, Kind::rf, Kind::gbt}) {
    const auto m = fit(k, Mode::predict_design, d, Hyper{}, 5);
    const auto back = model_from_json(to_json(m));
    for (std::size_t i = 0; i < d.features.rows(); ++i) CHECK(back.predict_class(d.features.row(i)) == m.predict_class(d.features.row(i)));
  }
}
