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
#include <stdexcept>

#include "onmar/metafeatures.hpp"

namespace onmar {

double MetaFeatureVector::at(const std::string& name) const {
  const auto it = std::find(names->begin(), names->end(), name);
  if (it == names->end()) throw std::out_of_range("unknown meta-feature '" + name + "'");
  return values[static_cast<std::size_t>(it - names->begin())];
}

bool MetaFeatureVector::is_valid(const std::string& name) const {
  const auto it = std::find(names->begin(), names->end(), name);
  if (it == names->end()) throw std::out_of_range("unknown meta-feature '" + name + "'");
  return valid[static_cast<std::size_t>(it - names->begin())] != 0;
}

void FeatureBlock::add(std::string name, double value, bool valid) {
  const bool ok = valid && std::isfinite(value);
  names_.push_back(std::move(name));
  values_.push_back(ok ? value : 0.0);
  valid_.push_back(ok ? 1 : 0);
}

FeatureBlock MetaFeatureExtractor::collect(const ApplicationAlgorithm& app, int timestep) const {
  if (options_.landscape_samples < 3) throw std::invalid_argument("landscape needs at least three samples");
  FeatureBlock block;
  Rng rng(derive_seed(options_.seed, static_cast<std::uint64_t>(timestep)));
  const LandscapeSample sample = app.sample_landscape(options_.landscape_samples, rng);
  ela::append_landscape_features(sample, block);

  const auto stats = ela::dataset_stats(app.dataset());
  block.add("imbalance", stats.imbalance);
  block.add("classes", stats.classes);
  block.add("instances", static_cast<double>(stats.instances));
  block.add("timestep", timestep);

  app.specific_features(block);
  return block;
}

MetaFeatureVector MetaFeatureExtractor::extract(const ApplicationAlgorithm& app, int timestep) const {
  FeatureBlock block = collect(app, timestep);
  return MetaFeatureVector{block.values(), block.valid(), std::make_shared<const FeatureNames>(block.names())};
}

FeatureNames MetaFeatureExtractor::schema(const ApplicationAlgorithm& app) const { return collect(app, 0).names(); }

}  // namespace onmar
