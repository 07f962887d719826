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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "onmar/bench.hpp"

namespace {

using namespace onmar;
using namespace onmar::bench;

void print_summary(const ComparisonReport& r) {
  for (std::size_t d = 0; d < r.datasets.size(); ++d) {
    std::printf("%s\n", r.datasets[d].c_str());
    std::printf("  %-12s %8s %10s %10s %8s %5s\n", "approach", "runs", "med.acc", "med.sec", "ga.calls", "rank");
    for (std::size_t a = 0; a < r.approaches.size(); ++a) {
      const Cell& c = r.cells[d][a];
      auto median = [](std::vector<double> v) {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
      };
      double calls = 0.0;
      for (auto x : c.engine_calls) calls += static_cast<double>(x);
      if (!c.engine_calls.empty()) calls /= static_cast<double>(c.engine_calls.size());
      const int rank = d < r.rankings.size() ? r.rankings[d].rank[a] : 1;
      std::printf("  %-12s %8zu %10.4f %10.2f %8.1f %5d%s\n", r.approaches[a].c_str(), c.final_accuracy.size(),
                  median(c.final_accuracy), median(c.wall_seconds), calls, rank, c.complete ? "" : "  (incomplete)");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Real-time algorithm design with meta-learner gating"};
  cli.require_subcommand(1);
  bool verbose = false;
  cli.add_flag("-v,--verbose", verbose, "Debug logging");

  auto* run = cli.add_subcommand("run", "Run an experiment sweep");
  std::string spec_path;
  std::vector<std::string> approaches{"baseline", "onmar_gbt", "offmar_gbt"};
  std::vector<std::string> datasets{"blobs:200,3,4,8"};
  int repeats = 30;
  int timesteps = 100;
  std::optional<int> theta_t;
  double theta_p = 0.85;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t workers = 1;
  std::size_t population = 70;
  std::size_t generations = 50;
  std::size_t landscape = 64;
  run->add_option("--spec", spec_path, "JSON experiment spec; other flags are ignored")->check(CLI::ExistingFile);
  run->add_option("--approach", approaches, "Approaches (space or comma separated), or 'all'")->delimiter(',');
  run->add_option("--dataset", datasets, "blobs:n,k,d,sep or csv:path");
  run->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  run->add_option("--timesteps", timesteps)->check(CLI::PositiveNumber);
  run->add_option("--theta-t", theta_t, "Defaults to timesteps / 2");
  run->add_option("--theta-p", theta_p);
  run->add_option("--seed", seed);
  run->add_option("--out", out, "Results directory");
  run->add_option("--workers", workers)->check(CLI::PositiveNumber);
  run->add_option("--population", population);
  run->add_option("--generations", generations);
  run->add_option("--landscape-samples", landscape);

  auto* report = cli.add_subcommand("report", "Aggregate a results directory");
  std::string results_dir;
  report->add_option("dir", results_dir)->required()->check(CLI::ExistingDirectory);

  auto* diagnose = cli.add_subcommand("diagnose", "Predicted-vs-actual series for one RunLog");
  std::string runlog_path;
  double delta = 0.2;
  int window = 10;
  diagnose->add_option("runlog", runlog_path)->required()->check(CLI::ExistingFile);
  diagnose->add_option("--delta", delta);
  diagnose->add_option("--window", window)->check(CLI::PositiveNumber);

  CLI11_PARSE(cli, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*run) {
      ExperimentSpec spec;
      if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        spec = spec_from_json(nlohmann::json::parse(in));
      } else {
        if (approaches.size() == 1 && approaches.front() == "all") spec.approaches = all_approaches();
        else
          for (const auto& a : approaches) spec.approaches.push_back(approach_from_string(a));
        for (const auto& d : datasets) spec.datasets.push_back(parse_dataset_source(d));
        spec.repeats = repeats;
        spec.output_dir = out;
        spec.workers = workers;
        spec.config.total_timesteps = timesteps;
        spec.config.theta_t = theta_t;
        spec.config.theta_p = theta_p;
        spec.config.seed = seed;
        spec.config.landscape_samples = landscape;
        spec.config.ga.population_size = population;
        spec.config.ga.generations = generations;
      }
      print_summary(run_experiment(spec));
    } else if (*report) {
      const ComparisonReport r = aggregate_results(results_dir);
      write_report(r, results_dir);
      print_summary(r);
    } else if (*diagnose) {
      std::ifstream in(runlog_path);
      const RunLog log = read_runlog(in);
      const Divergence dv = diagnostics_predicted_vs_actual(log, delta, window);
      std::printf("timestep,predicted,actual,gap,ga_invoked\n");
      for (std::size_t i = 0; i < log.records.size(); ++i) {
        const auto& r = log.records[i];
        if (r.predicted_performance)
          std::printf("%d,%.6f,%.6f,%.6f,%d\n", r.timestep, *r.predicted_performance, r.actual_performance,
                      *dv.gap[i], r.ga_invoked ? 1 : 0);
        else
          std::printf("%d,,%.6f,,%d\n", r.timestep, r.actual_performance, r.ga_invoked ? 1 : 0);
      }
      std::fprintf(stderr, "divergence flag: %s", dv.flagged ? "raised" : "clear");
      if (dv.flagged) std::fprintf(stderr, " (window starting at t=%d)", dv.first_flagged_timestep);
      std::fprintf(stderr, "\n");
      return dv.flagged ? 2 : 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
