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
#include "oracles.hpp"

using namespace onmar;

namespace {

LabeledDataset four_points() {
  LabeledDataset d;
  d.features = Matrix(4, 2, std::vector<double>{0, 0, 0, 1, 10, 0, 10, 1});
  d.labels = {0, 0, 1, 1};
  return d;
}

ClusterState with_centroids(const Matrix& c) {
  ClusterState s;
  s.clustering.centroids = c;
  s.clustering.k = static_cast<int>(c.rows());
  return s;
}

ClusterDesign lloyd(int k) {
  ClusterDesign d;
  d.k = k;
  d.metric = kernels::Metric::euclidean;
  d.assign = AssignRule::hard_nearest;
  d.update = UpdateRule::mean;
  return d;
}

double run_steps(const LabeledDataset& data, const ClusterDesign& design, std::uint64_t seed, int steps) {
  ClusterState s;
  s.init_seed = seed;
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) acc = app_step(s, design, data);
  return acc;
}

}  // namespace

TEST_CASE("hand-traced iteration on four points") {
  const auto data = four_points();
  auto s = with_centroids(Matrix(2, 2, std::vector<double>{0, 0, 10, 0}));
  const double acc = app_step(s, lloyd(2), data);
  CHECK(s.clustering.assignments == std::vector<int>{0, 0, 1, 1});
  CHECK(s.clustering.centroids == Matrix(2, 2, std::vector<double>{0, 0.5, 10, 0.5}));
  CHECK(acc == 1.0);
  CHECK(s.iteration == 1);
}

TEST_CASE("an empty cluster is moved onto the farthest point") {
  const auto data = four_points();
  auto s = with_centroids(Matrix(2, 2, std::vector<double>{0, 0, 100, 100}));
  app_step(s, lloyd(2), data);
  CHECK(s.clustering.assignments == std::vector<int>{0, 0, 1, 1});
  CHECK(s.clustering.centroids == Matrix(2, 2, std::vector<double>{0, 0.5, 10, 0.5}));
}

TEST_CASE("hard mean update matches a textbook Lloyd step") {
  Rng rng(1);
  int compared = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(uniform_index(rng, 4));
    const auto data = generate_blobs(40 + uniform_index(rng, 40), 3, 2 + uniform_index(rng, 3), 3.0, rng);
    Matrix c(static_cast<std::size_t>(k), data.dims());
    for (auto& v : c.data()) v = uniform_real(rng, -4.0, 4.0);
    const auto expect = oracle::lloyd_step(data.features, c);
    std::set<int> used(expect.labels.begin(), expect.labels.end());
    if (used.size() != static_cast<std::size_t>(k)) continue;  // repair diverges from the textbook step
    auto s = with_centroids(c);
    app_step(s, lloyd(k), data);
    CHECK(s.clustering.assignments == expect.labels);
    for (std::size_t i = 0; i < c.data().size(); ++i)
      CHECK(s.clustering.centroids.data()[i] == doctest::Approx(expect.centroids.data()[i]).epsilon(1e-9));
    ++compared;
  }
  CHECK(compared >= 20);
}

TEST_CASE("converged centroids are a fixed point") {
  Rng rng(2);
  const auto data = generate_blobs(90, 3, 2, 10.0, rng);
  ClusterState s;
  s.init_seed = 5;
  for (int i = 0; i < 30; ++i) app_step(s, lloyd(3), data);
  const Matrix before = s.clustering.centroids;
  const auto labels = s.clustering.assignments;
  app_step(s, lloyd(3), data);
  CHECK(s.clustering.assignments == labels);
  for (std::size_t i = 0; i < before.data().size(); ++i)
    CHECK(s.clustering.centroids.data()[i] == doctest::Approx(before.data()[i]));
}

TEST_CASE("a single cluster on a single class is perfectly accurate") {
  LabeledDataset d;
  d.features = Matrix(5, 1, std::vector<double>{1, 2, 3, 4, 5});
  d.labels.assign(5, 0);
  ClusterState s;
  CHECK(app_step(s, lloyd(1), d) == 1.0);
}

TEST_CASE("lookahead equals the executed step and leaves state alone") {
  Rng rng(3);
  const auto data = generate_blobs(120, 3, 3, 4.0, rng);
  ClusterApp app;
  app.reset(data, 17);
  for (int t = 0; t < 4; ++t) {
    const Design d = random_design(cluster_schema(), rng);
    const auto before = app.state().clustering.centroids;
    const double predicted = app.evaluate(d);
    CHECK(app.state().clustering.centroids == before);
    CHECK(predicted >= 0.0);
    CHECK(predicted <= 1.0);
    CHECK(app.exec(d, t) == predicted);
  }
  CHECK(app.state().iteration == 4);
}

TEST_CASE("the true number of clusters beats ten clusters") {
  double right = 0.0, ten = 0.0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto data = generate_blobs(150, 3, 2, 6.0, rng);
    ClusterDesign d = lloyd(3);
    d.init = InitRule::spread_maximal;
    right += run_steps(data, d, seed, 10);
    d.k = 10;
    ten += run_steps(data, d, seed, 10);
  }
  CHECK(right >= ten);
}

TEST_CASE("accuracy tracks separation") {
  double far = 0.0, none = 0.0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    far += run_steps(generate_blobs(100, 2, 2, 100.0, rng), lloyd(2), seed, 10);
    // one Gaussian cloud with arbitrary labels has no cluster structure
    auto noise = generate_blobs(100, 1, 2, 0.0, rng);
    for (std::size_t i = 0; i < noise.size(); ++i) noise.labels[i] = static_cast<int>(i % 2);
    none += run_steps(noise, lloyd(2), seed, 10);
  }
  CHECK(far / 30.0 > 0.99);
  CHECK(none / 30.0 > 0.5);
  CHECK(none / 30.0 < 0.65);
}

TEST_CASE("every operator combination stays finite") {
  Rng rng(4);
  const auto data = generate_blobs(80, 3, 3, 5.0, rng);
  for (int trial = 0; trial < 60; ++trial) {
    ClusterState s;
    s.init_seed = static_cast<std::uint64_t>(trial);
    for (int step = 0; step < 5; ++step) {
      const Design d = random_design(cluster_schema(), rng);
      const double acc = app_step(s, d, data);
      CHECK(acc >= 0.0);
      CHECK(acc <= 1.0);
      for (double v : s.clustering.centroids.data()) CHECK(std::isfinite(v));
      CHECK(is_valid(s.clustering));
    }
  }
}

TEST_CASE("initialisation is reproducible per seed and iteration") {
  Rng rng(5);
  const auto data = generate_blobs(60, 3, 2, 4.0, rng);
  for (InitRule rule : {InitRule::uniform_random, InitRule::sample_points, InitRule::spread_maximal}) {
    ClusterDesign d = lloyd(4);
    d.init = rule;
    ClusterState s;
    s.init_seed = 9;
    const auto a = initial_centroids(s, d, data);
    CHECK(a == initial_centroids(s, d, data));
    CHECK(a.rows() == 4);
    s.iteration = 1;
    CHECK_FALSE(a == initial_centroids(s, d, data));
  }
}

TEST_CASE("design decode and clustering features") {
  ClusterDesign c;
  c.metric = kernels::Metric::manhattan;
  c.init = InitRule::spread_maximal;
  c.assign = AssignRule::softmax_weighted;
  c.update = UpdateRule::online_eta;
  c.k = 7;
  c.eta = 0.3;
  const auto back = decode(encode_design(c));
  CHECK(back.metric == c.metric);
  CHECK(back.k == 7);
  CHECK(back.eta == 0.3);
  CHECK_THROWS(decode(Design{{0, 0, 0, 0, 11, 0.1}, cluster_schema().id()}));

  CHECK(cluster_feature_names().size() == 29);
  Rng rng(6);
  const auto data = generate_blobs(60, 2, 2, 5.0, rng);
  ClusterApp app;
  app.reset(data, 1);
  FeatureBlock before;
  app.specific_features(before);
  CHECK(before.names() == cluster_feature_names());
  CHECK(std::all_of(before.valid().begin(), before.valid().end(), [](char v) { return v == 0; }));
  app.exec(encode_design(lloyd(2)), 0);
  FeatureBlock after;
  app.specific_features(after);
  CHECK(after.names() == cluster_feature_names());
  for (double v : after.values()) CHECK(std::isfinite(v));
}
