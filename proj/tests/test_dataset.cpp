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
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "onmar/dataset.hpp"
#include "onmar/metafeatures.hpp"

using namespace onmar;

namespace {

LabeledDataset with_counts(const std::vector<std::size_t>& counts) {
  LabeledDataset d;
  d.features = Matrix(0, 2);
  double x = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c)
    for (std::size_t i = 0; i < counts[c]; ++i) {
      d.features.push_row(std::vector<double>{x, -x});
      x += 1.0;
      d.labels.push_back(static_cast<int>(c));
    }
  return d;
}

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("blobs are balanced, separated and reproducible") {
  Rng rng(1);
  const auto d = generate_blobs(100, 2, 3, 5.0, rng);
  CHECK(d.size() == 100);
  CHECK(d.dims() == 3);
  CHECK(d.classes() == 2);
  CHECK(ela::dataset_stats(d).imbalance <= 0.01);

  Rng odd(2);
  const auto o = generate_blobs(101, 3, 2, 5.0, odd);
  const auto counts = o.class_counts();
  CHECK(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()) <= 1);

  Rng a(7), b(7);
  const auto x = generate_blobs(50, 4, 2, 3.0, a);
  const auto y = generate_blobs(50, 4, 2, 3.0, b);
  CHECK(x.features == y.features);
  CHECK(x.labels == y.labels);
}

TEST_CASE("blob class means respect the separation") {
  Rng rng(3);
  const auto d = generate_blobs(4000, 4, 2, 10.0, rng);
  std::vector<std::vector<double>> mean(4, std::vector<double>(2, 0.0));
  const auto counts = d.class_counts();
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t f = 0; f < 2; ++f)
      mean[static_cast<std::size_t>(d.labels[i])][f] += d.features(i, f) / static_cast<double>(counts[static_cast<std::size_t>(d.labels[i])]);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b)
      CHECK(std::hypot(mean[a][0] - mean[b][0], mean[a][1] - mean[b][1]) > 10.0 - 0.3);
}

TEST_CASE("stratified folds") {
  Rng rng(4);
  const auto [a, b] = stratified_two_folds(with_counts({10, 10}), rng);
  CHECK(a.class_counts() == std::vector<std::size_t>{5, 5});
  CHECK(b.class_counts() == std::vector<std::size_t>{5, 5});

  const auto [c, d] = stratified_two_folds(with_counts({7, 4}), rng);
  CHECK(c.class_counts() == std::vector<std::size_t>{4, 2});
  CHECK(d.class_counts() == std::vector<std::size_t>{3, 2});

  CHECK_THROWS(stratified_two_folds(with_counts({5, 1}), rng));
}

TEST_CASE("stratified folds partition the dataset") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> counts;
    for (int c = 0; c < 4; ++c) counts.push_back(2 + uniform_index(rng, 9));
    const auto data = with_counts(counts);
    const auto [f1, f2] = stratified_two_folds(data, rng);
    CHECK(f1.size() + f2.size() == data.size());
    std::vector<double> seen;
    for (const auto* f : {&f1, &f2})
      for (std::size_t i = 0; i < f->size(); ++i) seen.push_back(f->features(i, 0));
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    const auto c1 = f1.class_counts(), c2 = f2.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) CHECK(std::abs(static_cast<long>(c1[c]) - static_cast<long>(c2[c])) <= 1);
  }
}

TEST_CASE("csv loading") {
  const auto plain = load_csv(write_temp("onmar_plain.csv", "1,2,a\n3,4,b\n5,6,a\n"));
  CHECK(plain.size() == 3);
  CHECK(plain.dims() == 2);
  CHECK(plain.labels == std::vector<int>{0, 1, 0});
  CHECK(plain.features(2, 1) == 6.0);

  const auto headed = load_csv(write_temp("onmar_head.csv", "x,y,label\n1,2,0\n3,4,1\n"), true);
  CHECK(headed.size() == 2);

  CHECK_THROWS(load_csv(write_temp("onmar_empty.csv", "")));
  try {
    load_csv(write_temp("onmar_ragged.csv", "1,2,0\n3,1\n"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    load_csv(write_temp("onmar_text.csv", "1,2,0\n3,4,1\nq,4,1\n"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}
