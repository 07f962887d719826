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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "onmar/common.hpp"

namespace onmar {

/// Numeric features with integer class labels 0..classes-1.
struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  std::string name;

  std::size_t size() const { return labels.size(); }
  std::size_t dims() const { return features.cols(); }
  int classes() const;
  std::vector<std::size_t> class_counts() const;
};

/// Throws std::invalid_argument unless n >= 2 and widths agree.
void validate(const LabeledDataset& data);

LabeledDataset subset(const LabeledDataset& data, const std::vector<std::size_t>& rows);

/// Isotropic unit-variance Gaussian clusters with centres at mutual distance
/// >= `separation` and balanced labels.
LabeledDataset generate_blobs(std::size_t n, int k_true, std::size_t d, double separation, Rng& rng);

/// Splits every class in half (first fold takes the odd instance).
/// Throws std::invalid_argument if a class has fewer than two instances.
std::pair<LabeledDataset, LabeledDataset> stratified_two_folds(const LabeledDataset& data, Rng& rng);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Comma-separated numeric features with the label in the final column.
/// Labels may be arbitrary strings; they are numbered by first appearance.
LabeledDataset load_csv(const std::filesystem::path& path, bool has_header = false);

}  // namespace onmar
