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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "onmar/common.hpp"

namespace onmar {

struct CategoricalGene {
  std::vector<std::string> options;
};

struct NumericGene {
  double lo = 0.0;
  double hi = 1.0;
  bool integer = false;
};

struct GeneDescriptor {
  std::string name;
  std::variant<CategoricalGene, NumericGene> domain;

  bool categorical() const { return std::holds_alternative<CategoricalGene>(domain); }
};

/// Ordered gene layout a Design must conform to.
class GeneSchema {
 public:
  GeneSchema(std::string id, std::vector<GeneDescriptor> genes);

  const std::string& id() const { return id_; }
  std::size_t size() const { return genes_.size(); }
  const GeneDescriptor& operator[](std::size_t i) const { return genes_[i]; }
  const std::vector<GeneDescriptor>& genes() const { return genes_; }

  /// Width of the one-hot / min-max encoding used as learner input.
  std::size_t encoded_width() const;

 private:
  std::string id_;
  std::vector<GeneDescriptor> genes_;
};

/// One chromosome: categorical genes hold an option index, numeric genes the value.
struct Design {
  std::vector<double> genes;
  std::string schema_id;

  friend bool operator==(const Design&, const Design&) = default;
  friend auto operator<=>(const Design&, const Design&) = default;
};

/// Empty string when valid, otherwise a description of the first violation.
std::string validation_error(const GeneSchema& schema, const Design& design);
bool is_valid(const GeneSchema& schema, const Design& design);

/// Clamps numeric genes, rounds integer genes and snaps categorical indices to
/// the nearest option. Returns true if anything changed.
bool repair(const GeneSchema& schema, Design& design);

Design random_design(const GeneSchema& schema, Rng& rng);
double random_gene(const GeneDescriptor& gene, Rng& rng);

/// Categorical genes one-hot, numeric genes scaled to [0, 1].
std::vector<double> encode(const GeneSchema& schema, const Design& design);

nlohmann::json to_json(const GeneSchema& schema);
nlohmann::json to_json(const Design& design);
Design design_from_json(const nlohmann::json& j);

}  // namespace onmar
