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

#include "onmar/design.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace onmar {

GeneSchema::GeneSchema(std::string id, std::vector<GeneDescriptor> genes) : id_(std::move(id)), genes_(std::move(genes)) {
  if (genes_.empty()) throw std::invalid_argument("gene schema must not be empty");
  for (const auto& g : genes_) {
    if (const auto* c = std::get_if<CategoricalGene>(&g.domain)) {
      if (c->options.empty()) throw std::invalid_argument("categorical gene '" + g.name + "' has no options");
    } else {
      const auto& n = std::get<NumericGene>(g.domain);
      if (!(n.lo <= n.hi)) throw std::invalid_argument("numeric gene '" + g.name + "' has lo > hi");
    }
  }
}

std::size_t GeneSchema::encoded_width() const {
  std::size_t w = 0;
  for (const auto& g : genes_) w += g.categorical() ? std::get<CategoricalGene>(g.domain).options.size() : 1;
  return w;
}

std::string validation_error(const GeneSchema& schema, const Design& design) {
  if (design.schema_id != schema.id()) return "schema id '" + design.schema_id + "' != '" + schema.id() + "'";
  if (design.genes.size() != schema.size()) {
    std::ostringstream os;
    os << "gene count " << design.genes.size() << " != " << schema.size();
    return os.str();
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const double v = design.genes[i];
    const auto& g = schema[i];
    if (!std::isfinite(v)) return "gene '" + g.name + "' is not finite";
    if (const auto* c = std::get_if<CategoricalGene>(&g.domain)) {
      if (v != std::floor(v) || v < 0 || v >= static_cast<double>(c->options.size()))
        return "gene '" + g.name + "' is not a valid option index";
    } else {
      const auto& n = std::get<NumericGene>(g.domain);
      if (v < n.lo || v > n.hi) return "gene '" + g.name + "' out of bounds";
      if (n.integer && v != std::floor(v)) return "gene '" + g.name + "' must be integral";
    }
  }
  return {};
}

bool is_valid(const GeneSchema& schema, const Design& design) { return validation_error(schema, design).empty(); }

bool repair(const GeneSchema& schema, Design& design) {
  bool changed = false;
  if (design.schema_id != schema.id()) {
    design.schema_id = schema.id();
    changed = true;
  }
  if (design.genes.size() != schema.size()) {
    design.genes.resize(schema.size(), 0.0);
    changed = true;
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    double v = std::isfinite(design.genes[i]) ? design.genes[i] : 0.0;
    const auto& g = schema[i];
    if (const auto* c = std::get_if<CategoricalGene>(&g.domain)) {
      v = std::clamp(std::round(v), 0.0, static_cast<double>(c->options.size() - 1));
    } else {
      const auto& n = std::get<NumericGene>(g.domain);
      if (n.integer) v = std::round(v);
      v = std::clamp(v, n.lo, n.hi);
    }
    if (v != design.genes[i]) {
      design.genes[i] = v;
      changed = true;
    }
  }
  return changed;
}

double random_gene(const GeneDescriptor& gene, Rng& rng) {
  if (const auto* c = std::get_if<CategoricalGene>(&gene.domain))
    return static_cast<double>(uniform_index(rng, c->options.size()));
  const auto& n = std::get<NumericGene>(gene.domain);
  if (n.integer) {
    const auto lo = static_cast<long long>(std::ceil(n.lo));
    const auto hi = static_cast<long long>(std::floor(n.hi));
    return static_cast<double>(lo + static_cast<long long>(uniform_index(rng, static_cast<std::size_t>(hi - lo + 1))));
  }
  return uniform_real(rng, n.lo, n.hi);
}

Design random_design(const GeneSchema& schema, Rng& rng) {
  Design d{{}, schema.id()};
  d.genes.reserve(schema.size());
  for (const auto& g : schema.genes()) d.genes.push_back(random_gene(g, rng));
  return d;
}

std::vector<double> encode(const GeneSchema& schema, const Design& design) {
  if (design.genes.size() != schema.size()) throw std::invalid_argument("encode: gene count mismatch");
  std::vector<double> out;
  out.reserve(schema.encoded_width());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& g = schema[i];
    if (const auto* c = std::get_if<CategoricalGene>(&g.domain)) {
      const auto idx = static_cast<std::size_t>(design.genes[i]);
      for (std::size_t o = 0; o < c->options.size(); ++o) out.push_back(o == idx ? 1.0 : 0.0);
    } else {
      const auto& n = std::get<NumericGene>(g.domain);
      out.push_back(n.hi > n.lo ? (design.genes[i] - n.lo) / (n.hi - n.lo) : 0.0);
    }
  }
  return out;
}

nlohmann::json to_json(const GeneSchema& schema) {
  nlohmann::json genes = nlohmann::json::array();
  for (const auto& g : schema.genes()) {
    if (const auto* c = std::get_if<CategoricalGene>(&g.domain)) {
      genes.push_back({{"name", g.name}, {"kind", "categorical"}, {"options", c->options}});
    } else {
      const auto& n = std::get<NumericGene>(g.domain);
      genes.push_back({{"name", g.name}, {"kind", n.integer ? "integer" : "real"}, {"lo", n.lo}, {"hi", n.hi}});
    }
  }
  return {{"id", schema.id()}, {"genes", genes}};
}

nlohmann::json to_json(const Design& design) { return {{"schema_id", design.schema_id}, {"genes", design.genes}}; }

Design design_from_json(const nlohmann::json& j) {
  return Design{j.at("genes").get<std::vector<double>>(), j.at("schema_id").get<std::string>()};
}

}  // namespace onmar
