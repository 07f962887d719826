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

// Experiment harness: repeated runs of each approach, rank-sum testing,
// ranking, runtime and per-second accuracy analysis.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "onmar/core.hpp"
#include "onmar/dataset.hpp"

namespace onmar::bench {

// ---------------------------------------------------------------- statistics

enum class Alternative { less, greater, two_sided };

struct MwuResult {
  double u_a = 0.0;  // rank sum of a minus n_a(n_a+1)/2
  double u_b = 0.0;
  double p = 1.0;
  bool exact = false;
};

/// Exact null distribution when |a| + |b| <= 12 and there are no ties,
/// otherwise the normal approximation with tie and continuity corrections.
/// `less` tests whether a tends to be smaller than b.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alternative);

/// Number of ways to reach each U in 0..n_a*n_b; sums to C(n_a + n_b, n_a).
std::vector<double> mwu_null_counts(std::size_t n_a, std::size_t n_b);

struct Ranking {
  std::vector<int> wins;
  std::vector<int> rank;  // dense, 1 = most wins
};

/// Pairwise one-sided tests in both directions; a pair yields a win only when
/// the two-sided test rejects at `alpha`.
Ranking rank_approaches(const std::vector<std::vector<double>>& samples, double alpha = 0.05);

/// Dense rank of each approach's mean rank across datasets (`ranks[dataset][approach]`).
std::vector<int> normalized_ranks(const std::vector<std::vector<int>>& ranks);

// ---------------------------------------------------------------- runtime analysis

/// Headline numbers of one run of one approach.
struct RunSummary {
  double first_accuracy = 0.0;
  double final_accuracy = 0.0;
  double wall_seconds = 0.0;
  std::size_t engine_calls = 0;
};

RunSummary summarize(const RunLog& log, double extra_seconds = 0.0);

/// (final - first accuracy) / wall seconds; undefined for zero elapsed time.
Scored gain_per_second(const RunSummary& run);

/// Accuracy at each whole second 0..ceil(total) by piecewise-constant
/// interpolation; 0 before the first timestep completes. `offset` shifts the
/// whole log later (time spent before it started).
std::vector<double> accuracy_per_second_trace(const RunLog& log, double offset = 0.0);

/// `runs[dataset][approach]` -> mean gain per second over repeats, min-max
/// normalised over every defined cell of the matrix. A matrix whose defined
/// cells are all equal (including a single cell) normalises to 0.
std::vector<std::vector<Scored>> accuracy_per_second(const std::vector<std::vector<std::vector<RunSummary>>>& runs);

struct Divergence {
  std::vector<std::optional<double>> gap;  // predicted - actual per timestep
  bool flagged = false;
  int first_flagged_timestep = -1;  // start of the first offending window
};

/// Flags `window` consecutive timesteps where predicted - actual > delta and
/// the engine was not invoked.
Divergence diagnostics_predicted_vs_actual(const RunLog& log, double delta = 0.2, int window = 10);

// ---------------------------------------------------------------- experiments

enum class Approach { baseline, onmar_knn, onmar_rf, onmar_gbt, offmar_knn, offmar_rf, offmar_gbt };

std::string to_string(Approach a);
Approach approach_from_string(const std::string& s);
std::vector<Approach> all_approaches();

struct DatasetSource {
  enum class Kind { blobs, csv } kind = Kind::blobs;
  std::size_t n = 200;
  int k = 3;
  std::size_t d = 4;
  double separation = 8.0;
  std::filesystem::path path;
  bool has_header = false;

  std::string name() const;
};

/// "blobs:n,k,d,sep" or "csv:path".
DatasetSource parse_dataset_source(const std::string& text);

/// Dataset for repeat seed `seed`: blobs are regenerated per repeat, CSV data
/// is loaded as is.
LabeledDataset materialize(const DatasetSource& source, std::uint64_t seed);

struct ExperimentSpec {
  std::vector<Approach> approaches;
  std::vector<DatasetSource> datasets;
  int repeats = 30;
  RunConfig config;  // seed is the root seed
  std::filesystem::path output_dir;
  std::size_t workers = 1;
};

void validate(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentSpec& spec);

/// Everything produced by one run of one approach.
struct ApproachRun {
  RunLog log;                      // fold-2 trajectory
  std::optional<RunLog> phase1;    // offline approaches only
  KnowledgeRepository repository;  // online: full repository; offline: phase-1 repository
  RunSummary summary;
};

/// Runs `approach` once on the stratified folds of `data`. Online approaches
/// and the baseline run on fold 2, as does offline phase 2.
ApproachRun run_approach(Approach approach, const LabeledDataset& data, const RunConfig& config);

struct RunOutcome {
  std::size_t approach = 0;  // index into the report's approaches
  std::size_t dataset = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunSummary summary;
};

struct Cell {
  std::vector<double> final_accuracy;
  std::vector<double> wall_seconds;
  std::vector<std::size_t> engine_calls;
  std::vector<std::string> errors;
  bool complete = false;
};

struct PairwiseTest {
  std::size_t a = 0;
  std::size_t b = 0;
  double p_less = 1.0;       // a worse than b
  double p_greater = 1.0;    // a better than b
  double p_two_sided = 1.0;
};

struct ComparisonReport {
  std::vector<std::string> approaches;
  std::vector<std::string> datasets;
  int repeats = 0;
  std::vector<std::vector<Cell>> cells;               // [dataset][approach]
  std::vector<std::vector<PairwiseTest>> pairwise;    // [dataset]
  std::vector<Ranking> rankings;                      // [dataset], empty with < 2 approaches
  std::vector<int> normalized_rank;                   // [approach]
  std::vector<std::vector<Scored>> gain_per_second;   // [dataset][approach]
};

/// Aggregates completed runs. Cells with missing runs are marked incomplete.
ComparisonReport build_report(const std::vector<std::string>& approaches, const std::vector<std::string>& datasets,
                              int repeats, const std::vector<RunOutcome>& outcomes);

/// Executes every (approach, dataset, repeat) and writes RunLogs, per-run
/// metadata and the report under spec.output_dir (when set).
ComparisonReport run_experiment(const ExperimentSpec& spec);

/// Rebuilds the report from a results directory written by run_experiment.
ComparisonReport aggregate_results(const std::filesystem::path& dir);

nlohmann::json to_json(const ComparisonReport& report);
/// report.json plus CSV tables.
void write_report(const ComparisonReport& report, const std::filesystem::path& dir);

}  // namespace onmar::bench
