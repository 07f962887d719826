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

#include <vector>

#include "onmar/design.hpp"
#include "onmar/features.hpp"

namespace onmar {

/// One (meta-features, design, performance) observation.
struct KnowledgeEntry {
  MetaFeatureVector meta_features;
  Design design;
  double performance = 0.0;  // in [0, 1]
  int timestep = 0;
};

using KnowledgeRepository = std::vector<KnowledgeEntry>;

}  // namespace onmar
