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

#include <set>

#include "doctest.h"
#include "onmar/common.hpp"

using namespace onmar;

TEST_CASE("derive_seed is a deterministic function of parent and index") {
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(7, 4));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("component slots give distinct child seeds") {
  std::set<std::uint64_t> seen;
  for (auto slot : {SeedSlot::design_engine, SeedSlot::landscape, SeedSlot::application, SeedSlot::meta_learner,
                    SeedSlot::folds, SeedSlot::dataset})
    seen.insert(child_seed(42, slot));
  CHECK(seen.size() == 6);
}

TEST_CASE("uniform_index stays in range and is close to uniform") {
  Rng rng(1);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const auto v = uniform_index(rng, 7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - draws / 7.0) * (c - draws / 7.0) / (draws / 7.0);
  CHECK(chi2 < 22.46);  // 6 dof, p = 0.001
}

TEST_CASE("uniform01 lies in [0, 1) and standard_normal has unit moments") {
  Rng rng(9);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double z = standard_normal(rng);
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("Matrix row access and push_row") {
  Matrix m(0, 3);
  m.push_row(std::vector<double>{1, 2, 3});
  m.push_row(std::vector<double>{4, 5, 6});
  CHECK(m.rows() == 2);
  CHECK(m(1, 2) == 6);
  CHECK(m.row(0)[1] == 2);
  CHECK_THROWS(m.push_row(std::vector<double>{1}));
}
