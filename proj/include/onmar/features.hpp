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

#include <memory>
#include <string>
#include <vector>

#include "onmar/common.hpp"

namespace onmar {

using FeatureNames = std::vector<std::string>;

/// Fixed-schema meta-feature vector. Values are always finite: undefined or
/// non-finite raw values are stored as 0 with the matching `valid` bit cleared.
struct MetaFeatureVector {
  std::vector<double> values;
  std::vector<char> valid;
  std::shared_ptr<const FeatureNames> names;

  std::size_t size() const { return values.size(); }
  double at(const std::string& name) const;
  bool is_valid(const std::string& name) const;
};

/// Accumulates named features in order, applying the sentinel policy.
class FeatureBlock {
 public:
  void add(std::string name, double value, bool valid = true);
  void add(std::string name, Scored s) { add(std::move(name), s.value, s.valid); }

  const FeatureNames& names() const { return names_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<char>& valid() const { return valid_; }

 private:
  FeatureNames names_;
  std::vector<double> values_;
  std::vector<char> valid_;
};

/// Sampled fitness landscape: `xs` holds one candidate per row, `ys` the
/// objective (clustering accuracy, maximised).
struct LandscapeSample {
  Matrix xs;
  std::vector<double> ys;
  std::vector<std::pair<double, double>> bounds;
};

}  // namespace onmar
