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

// Online (meta-learner gated) and offline (two-phase replay) controllers.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "onmar/application.hpp"
#include "onmar/design_ga.hpp"
#include "onmar/knowledge.hpp"
#include "onmar/metafeatures.hpp"
#include "onmar/metalearners.hpp"

namespace onmar {

struct RunConfig {
  int total_timesteps = 100;
  /// Unset means total_timesteps / 2.
  std::optional<int> theta_t;
  double theta_p = 0.85;
  ml::Kind meta_learner = ml::Kind::gbt;
  ml::Hyper hyper;
  std::uint64_t seed = 0;
  GaParams ga;
  std::size_t landscape_samples = 64;

  int gate_timestep() const { return theta_t.value_or(total_timesteps / 2); }
};

/// Throws std::invalid_argument for an inconsistent configuration.
void validate(const RunConfig& config);

struct RunRecord {
  int timestep = 0;
  Design design;
  double actual_performance = 0.0;
  std::optional<double> predicted_performance;
  bool ga_invoked = false;
  double elapsed_wall_seconds = 0.0;  // since the start of the run
};

struct RunLog {
  std::vector<RunRecord> records;

  std::size_t engine_calls() const;
  double final_performance() const { return records.empty() ? 0.0 : records.back().actual_performance; }
  double wall_seconds() const { return records.empty() ? 0.0 : records.back().elapsed_wall_seconds; }
};

/// Equality ignoring wall-clock times.
bool same_trajectory(const RunLog& a, const RunLog& b);

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by kr_prune when nothing survives the threshold.
class EmptyRepositoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Timesteps 0..N. Up to the gate timestep the engine runs every step; after
/// it, the engine runs only when the meta-learner predicts the carried design
/// below theta_p. The learner is refit on the whole repository every step.
RunLog onmar_run(const RunConfig& config, const LabeledDataset& dataset, ApplicationAlgorithm& app,
                 DesignEngine& engine, MetaFeatureExtractor& extractor, KnowledgeRepository* repository = nullptr);

/// Engine at every timestep; returns one entry per timestep.
KnowledgeRepository offmar_phase1(const RunConfig& config, const LabeledDataset& fold1, ApplicationAlgorithm& app,
                                  DesignEngine& engine, MetaFeatureExtractor& extractor, RunLog* log = nullptr);

/// Entries with performance >= theta_p, order preserved.
KnowledgeRepository kr_prune(const KnowledgeRepository& kr, double theta_p);

/// Replays fold 2 with designs predicted from meta-features. Never touches a
/// design engine.
RunLog offmar_phase2(const KnowledgeRepository& kr_pruned, const RunConfig& config, const LabeledDataset& fold2,
                     ApplicationAlgorithm& app, MetaFeatureExtractor& extractor);

struct OffmarResult {
  KnowledgeRepository repository;
  KnowledgeRepository pruned;
  bool fell_back = false;  // pruning emptied the repository
  RunLog phase1;
  RunLog phase2;

  double wall_seconds() const { return phase1.wall_seconds() + phase2.wall_seconds(); }
};

/// Both phases. An empty pruned repository falls back to the single best
/// entry (first on ties).
OffmarResult offmar_run(const RunConfig& config, const LabeledDataset& fold1, const LabeledDataset& fold2,
                        ApplicationAlgorithm& app, DesignEngine& engine, MetaFeatureExtractor& extractor);

// ---------------------------------------------------------------- serialization

nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& j);

void write_runlog(std::ostream& out, const RunLog& log);
RunLog read_runlog(std::istream& in);

nlohmann::json repository_to_json(const KnowledgeRepository& kr, const GeneSchema& schema);
/// Feature names are restored from the header and shared across entries.
KnowledgeRepository repository_from_json(const nlohmann::json& j);

nlohmann::json feature_schema_json(const FeatureNames& names);

}  // namespace onmar
