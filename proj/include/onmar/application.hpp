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

#include <cstdint>

#include "onmar/dataset.hpp"
#include "onmar/design.hpp"
#include "onmar/features.hpp"

namespace onmar {

/// The algorithm being designed. One call to exec() is one timestep.
class ApplicationAlgorithm {
 public:
  virtual ~ApplicationAlgorithm() = default;

  virtual const GeneSchema& schema() const = 0;

  /// Discards all state and binds the dataset for a new run.
  virtual void reset(const LabeledDataset& data, std::uint64_t seed) = 0;
  virtual const LabeledDataset& dataset() const = 0;

  /// Runs one timestep with `design` and returns its performance in [0, 1].
  virtual double exec(const Design& design, int timestep) = 0;

  /// Performance `design` would achieve on the next timestep, without
  /// advancing the state. Must be a pure function of (state, design).
  virtual double evaluate(const Design& design) const = 0;

  virtual LandscapeSample sample_landscape(std::size_t n_samples, Rng& rng) const = 0;

  /// Application-specific meta-features of the current state. The set of
  /// names must not depend on the state.
  virtual void specific_features(FeatureBlock& out) const = 0;
};

}  // namespace onmar
