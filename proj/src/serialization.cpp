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

#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include "onmar/core.hpp"

namespace onmar {

nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j{{"timestep", r.timestep},
                   {"design", to_json(r.design)},
                   {"actual_performance", r.actual_performance},
                   {"predicted_performance", nullptr},
                   {"ga_invoked", r.ga_invoked},
                   {"elapsed_wall_seconds", r.elapsed_wall_seconds}};
  if (r.predicted_performance) j["predicted_performance"] = *r.predicted_performance;
  return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.timestep = j.at("timestep").get<int>();
  r.design = design_from_json(j.at("design"));
  r.actual_performance = j.at("actual_performance").get<double>();
  if (j.contains("predicted_performance") && !j.at("predicted_performance").is_null())
    r.predicted_performance = j.at("predicted_performance").get<double>();
  r.ga_invoked = j.at("ga_invoked").get<bool>();
  r.elapsed_wall_seconds = j.at("elapsed_wall_seconds").get<double>();
  return r;
}

void write_runlog(std::ostream& out, const RunLog& log) {
  for (const auto& r : log.records) out << to_json(r).dump() << '\n';
}

RunLog read_runlog(std::istream& in) {
  RunLog log;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      log.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("runlog line " + std::to_string(n) + ": " + e.what());
    }
  }
  return log;
}

nlohmann::json feature_schema_json(const FeatureNames& names) { return {{"features", names}}; }

nlohmann::json repository_to_json(const KnowledgeRepository& kr, const GeneSchema& schema) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : kr) {
    std::vector<int> valid(e.meta_features.valid.begin(), e.meta_features.valid.end());
    entries.push_back({{"timestep", e.timestep},
                       {"performance", e.performance},
                       {"design", to_json(e.design)},
                       {"meta_features", e.meta_features.values},
                       {"valid", valid}});
  }
  nlohmann::json header{{"gene_schema", to_json(schema)}, {"size", kr.size()}};
  if (!kr.empty() && kr.front().meta_features.names) header["features"] = *kr.front().meta_features.names;
  else header["features"] = nlohmann::json::array();
  return {{"header", header}, {"entries", entries}};
}

KnowledgeRepository repository_from_json(const nlohmann::json& j) {
  auto names = std::make_shared<const FeatureNames>(j.at("header").at("features").get<FeatureNames>());
  KnowledgeRepository kr;
  for (const auto& e : j.at("entries")) {
    KnowledgeEntry entry;
    entry.timestep = e.at("timestep").get<int>();
    entry.performance = e.at("performance").get<double>();
    entry.design = design_from_json(e.at("design"));
    entry.meta_features.values = e.at("meta_features").get<std::vector<double>>();
    for (int v : e.at("valid").get<std::vector<int>>()) entry.meta_features.valid.push_back(v ? 1 : 0);
    entry.meta_features.names = names;
    if (entry.meta_features.values.size() != names->size())
      throw std::runtime_error("repository entry width does not match the feature header");
    kr.push_back(std::move(entry));
  }
  return kr;
}

}  // namespace onmar
