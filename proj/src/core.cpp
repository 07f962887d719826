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

#include "onmar/core.hpp"

#include <algorithm>
#include <chrono>

#include <spdlog/spdlog.h>

namespace onmar {

void validate(const RunConfig& c) {
  if (c.total_timesteps < 1) throw std::invalid_argument("RunConfig.total_timesteps must be positive");
  const int theta_t = c.gate_timestep();
  if (theta_t < 0 || theta_t > c.total_timesteps)
    throw std::invalid_argument("RunConfig.theta_t must lie in [0, total_timesteps]");
  if (!(c.theta_p >= 0.0 && c.theta_p <= 1.0)) {
    // an unreachable threshold above 1 is how the always-invoke baseline is expressed
    if (!(c.theta_p > 1.0 && std::isfinite(c.theta_p)))
      throw std::invalid_argument("RunConfig.theta_p must be finite and non-negative");
  }
  if (c.landscape_samples < 3) throw std::invalid_argument("RunConfig.landscape_samples must be at least 3");
  validate(c.ga);
}

std::size_t RunLog::engine_calls() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const RunRecord& r) { return r.ga_invoked; }));
}

bool same_trajectory(const RunLog& a, const RunLog& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.timestep != y.timestep || x.design != y.design || x.actual_performance != y.actual_performance ||
        x.predicted_performance != y.predicted_performance || x.ga_invoked != y.ga_invoked)
      return false;
  }
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Seeds {
  std::uint64_t engine, landscape, application, learner;
  explicit Seeds(std::uint64_t root)
      : engine(child_seed(root, SeedSlot::design_engine)),
        landscape(child_seed(root, SeedSlot::landscape)),
        application(child_seed(root, SeedSlot::application)),
        learner(child_seed(root, SeedSlot::meta_learner)) {}
};

Design engine_design(DesignEngine& engine, const ApplicationAlgorithm& app, int t) {
  const GeneSchema& schema = app.schema();
  Design d = engine.design(schema, [&app](const Design& x) { return app.evaluate(x); }, t);
  if (const auto err = validation_error(schema, d); !err.empty())
    throw EngineError("design engine returned an invalid design at timestep " + std::to_string(t) + ": " + err);
  return d;
}

void prepare(const RunConfig& config, const LabeledDataset& data, ApplicationAlgorithm& app,
             MetaFeatureExtractor& extractor, const Seeds& seeds) {
  validate(config);
  if (data.size() == 0) throw std::invalid_argument("dataset is empty");
  validate(data);
  app.reset(data, seeds.application);
  extractor.reseed(seeds.landscape);
}

}  // namespace

RunLog onmar_run(const RunConfig& config, const LabeledDataset& dataset, ApplicationAlgorithm& app,
                 DesignEngine& engine, MetaFeatureExtractor& extractor, KnowledgeRepository* repository) {
  const Seeds seeds(config.seed);
  prepare(config, dataset, app, extractor, seeds);
  engine.reset(seeds.engine);
  const GeneSchema& schema = app.schema();
  const int theta_t = config.gate_timestep();

  RunLog log;
  log.records.reserve(static_cast<std::size_t>(config.total_timesteps) + 1);
  KnowledgeRepository kr;
  std::optional<Design> carried;
  std::optional<ml::MetaLearnerModel> model;
  const auto start = Clock::now();

  for (int t = 0; t <= config.total_timesteps; ++t) {
    RunRecord rec;
    rec.timestep = t;
    MetaFeatureVector mf = extractor.extract(app, t);
    bool invoke = true;
    if (t > theta_t) {
      rec.predicted_performance = ml::predict_performance(*model, mf, *carried, schema);
      invoke = *rec.predicted_performance < config.theta_p;
    }
    if (invoke) carried = engine_design(engine, app, t);
    rec.ga_invoked = invoke;
    rec.design = *carried;
    rec.actual_performance = app.exec(*carried, t);

    kr.push_back(KnowledgeEntry{std::move(mf), *carried, rec.actual_performance, t});
    model = ml::fit(config.meta_learner, ml::Mode::regress_performance, ml::regression_matrix(kr, schema),
                    config.hyper, derive_seed(seeds.learner, static_cast<std::uint64_t>(t)));

    rec.elapsed_wall_seconds = seconds_since(start);
    spdlog::debug("onmar t={} ga={} p={:.4f}", t, rec.ga_invoked, rec.actual_performance);
    log.records.push_back(std::move(rec));
  }
  if (repository) *repository = std::move(kr);
  return log;
}

KnowledgeRepository offmar_phase1(const RunConfig& config, const LabeledDataset& fold1, ApplicationAlgorithm& app,
                                  DesignEngine& engine, MetaFeatureExtractor& extractor, RunLog* log) {
  const Seeds seeds(config.seed);
  prepare(config, fold1, app, extractor, seeds);
  engine.reset(seeds.engine);

  KnowledgeRepository kr;
  kr.reserve(static_cast<std::size_t>(config.total_timesteps) + 1);
  RunLog local;
  const auto start = Clock::now();
  for (int t = 0; t <= config.total_timesteps; ++t) {
    MetaFeatureVector mf = extractor.extract(app, t);
    Design d = engine_design(engine, app, t);
    const double p = app.exec(d, t);
    kr.push_back(KnowledgeEntry{std::move(mf), d, p, t});
    local.records.push_back(RunRecord{t, std::move(d), p, std::nullopt, true, seconds_since(start)});
  }
  if (log) *log = std::move(local);
  return kr;
}

KnowledgeRepository kr_prune(const KnowledgeRepository& kr, double theta_p) {
  KnowledgeRepository out;
  std::copy_if(kr.begin(), kr.end(), std::back_inserter(out),
               [theta_p](const KnowledgeEntry& e) { return e.performance >= theta_p; });
  if (out.empty() && !kr.empty())
    throw EmptyRepositoryError("no repository entry reaches theta_p = " + std::to_string(theta_p));
  return out;
}

RunLog offmar_phase2(const KnowledgeRepository& kr_pruned, const RunConfig& config, const LabeledDataset& fold2,
                     ApplicationAlgorithm& app, MetaFeatureExtractor& extractor) {
  if (kr_pruned.empty()) throw std::invalid_argument("offmar_phase2: empty repository");
  const Seeds seeds(config.seed);
  prepare(config, fold2, app, extractor, seeds);
  const GeneSchema& schema = app.schema();

  RunLog log;
  const auto start = Clock::now();
  const ml::MetaLearnerModel model =
      ml::fit(config.meta_learner, ml::Mode::predict_design, ml::design_matrix(kr_pruned), config.hyper, seeds.learner);
  for (int t = 0; t <= config.total_timesteps; ++t) {
    const MetaFeatureVector mf = extractor.extract(app, t);
    Design d = ml::predict_design(model, mf);
    if (repair(schema, d)) spdlog::warn("offmar phase 2: predicted design repaired at t={}", t);
    const double p = app.exec(d, t);
    log.records.push_back(RunRecord{t, std::move(d), p, std::nullopt, false, seconds_since(start)});
  }
  return log;
}

OffmarResult offmar_run(const RunConfig& config, const LabeledDataset& fold1, const LabeledDataset& fold2,
                        ApplicationAlgorithm& app, DesignEngine& engine, MetaFeatureExtractor& extractor) {
  OffmarResult r;
  r.repository = offmar_phase1(config, fold1, app, engine, extractor, &r.phase1);
  try {
    r.pruned = kr_prune(r.repository, config.theta_p);
  } catch (const EmptyRepositoryError& e) {
    spdlog::info("{}; falling back to the best entry", e.what());
    const auto best = std::max_element(r.repository.begin(), r.repository.end(),
                                       [](const KnowledgeEntry& a, const KnowledgeEntry& b) { return a.performance < b.performance; });
    r.pruned = {*best};
    r.fell_back = true;
  }
  r.phase2 = offmar_phase2(r.pruned, config, fold2, app, extractor);
  return r;
}

}  // namespace onmar
