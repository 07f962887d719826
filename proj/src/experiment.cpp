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

#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

#include "onmar/bench.hpp"
#include "onmar/clusterapp.hpp"

namespace onmar::bench {

namespace fs = std::filesystem;

std::string to_string(Approach a) {
  switch (a) {
    case Approach::baseline: return "baseline";
    case Approach::onmar_knn: return "onmar_knn";
    case Approach::onmar_rf: return "onmar_rf";
    case Approach::onmar_gbt: return "onmar_gbt";
    case Approach::offmar_knn: return "offmar_knn";
    case Approach::offmar_rf: return "offmar_rf";
    case Approach::offmar_gbt: return "offmar_gbt";
  }
  return "?";
}

std::vector<Approach> all_approaches() {
  return {Approach::baseline,   Approach::onmar_knn, Approach::onmar_rf,  Approach::onmar_gbt,
          Approach::offmar_knn, Approach::offmar_rf, Approach::offmar_gbt};
}

Approach approach_from_string(const std::string& s) {
  for (Approach a : all_approaches())
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown approach '" + s + "'");
}

std::string DatasetSource::name() const {
  if (kind == Kind::csv) return path.stem().string();
  std::ostringstream os;
  os << "blobs_" << n << '_' << k << '_' << d << '_' << separation;
  return os.str();
}

DatasetSource parse_dataset_source(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("dataset source needs a kind prefix: " + text);
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  DatasetSource s;
  if (kind == "csv") {
    if (rest.empty()) throw std::invalid_argument("csv dataset source needs a path");
    s.kind = DatasetSource::Kind::csv;
    s.path = rest;
    return s;
  }
  if (kind != "blobs") throw std::invalid_argument("unknown dataset kind '" + kind + "'");
  std::vector<double> v;
  std::stringstream ss(rest);
  for (std::string part; std::getline(ss, part, ',');) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), x);
    if (ec != std::errc{} || p != part.data() + part.size())
      throw std::invalid_argument("bad number '" + part + "' in dataset source");
    v.push_back(x);
  }
  if (v.size() != 4) throw std::invalid_argument("blobs source expects n,k,d,sep");
  if (v[0] < 2 || v[1] < 1 || v[2] < 1 || v[3] < 0) throw std::invalid_argument("blobs source out of range");
  s.n = static_cast<std::size_t>(v[0]);
  s.k = static_cast<int>(v[1]);
  s.d = static_cast<std::size_t>(v[2]);
  s.separation = v[3];
  return s;
}

LabeledDataset materialize(const DatasetSource& source, std::uint64_t seed) {
  if (source.kind == DatasetSource::Kind::csv) {
    LabeledDataset d = load_csv(source.path, source.has_header);
    d.name = source.name();
    return d;
  }
  Rng rng(seed);
  LabeledDataset d = generate_blobs(source.n, source.k, source.d, source.separation, rng);
  d.name = source.name();
  return d;
}

void validate(const ExperimentSpec& spec) {
  if (spec.approaches.empty()) throw std::invalid_argument("experiment needs at least one approach");
  if (spec.datasets.empty()) throw std::invalid_argument("experiment needs at least one dataset");
  if (spec.repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  if (spec.workers < 1) throw std::invalid_argument("workers must be at least 1");
  validate(spec.config);
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  for (const auto& a : j.at("approaches")) s.approaches.push_back(approach_from_string(a.get<std::string>()));
  for (const auto& d : j.at("datasets")) {
    DatasetSource src = parse_dataset_source(d.is_string() ? d.get<std::string>() : d.at("source").get<std::string>());
    if (d.is_object()) src.has_header = d.value("header", false);
    s.datasets.push_back(std::move(src));
  }
  s.repeats = j.value("repeats", 30);
  s.workers = j.value("workers", std::size_t{1});
  s.output_dir = j.value("output_dir", std::string{});
  const auto c = j.value("config", nlohmann::json::object());
  s.config.total_timesteps = c.value("timesteps", s.config.total_timesteps);
  if (c.contains("theta_t") && !c.at("theta_t").is_null()) s.config.theta_t = c.at("theta_t").get<int>();
  s.config.theta_p = c.value("theta_p", s.config.theta_p);
  s.config.seed = c.value("seed", s.config.seed);
  s.config.landscape_samples = c.value("landscape_samples", s.config.landscape_samples);
  s.config.ga.population_size = c.value("population_size", s.config.ga.population_size);
  s.config.ga.generations = c.value("generations", s.config.ga.generations);
  s.config.ga.crossover_rate = c.value("crossover_rate", s.config.ga.crossover_rate);
  s.config.ga.mutation_rate = c.value("mutation_rate", s.config.ga.mutation_rate);
  s.config.ga.tournament_size = c.value("tournament_size", s.config.ga.tournament_size);
  if (c.contains("per_gene_mutation_prob")) s.config.ga.per_gene_mutation_prob = c.at("per_gene_mutation_prob").get<double>();
  return s;
}

nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json approaches = nlohmann::json::array(), datasets = nlohmann::json::array();
  for (Approach a : s.approaches) approaches.push_back(to_string(a));
  for (const auto& d : s.datasets) {
    if (d.kind == DatasetSource::Kind::csv)
      datasets.push_back({{"source", "csv:" + d.path.string()}, {"header", d.has_header}});
    else {
      std::ostringstream os;
      os << "blobs:" << d.n << ',' << d.k << ',' << d.d << ',' << d.separation;
      datasets.push_back(os.str());
    }
  }
  nlohmann::json config{{"timesteps", s.config.total_timesteps},
                        {"theta_t", s.config.gate_timestep()},
                        {"theta_p", s.config.theta_p},
                        {"seed", s.config.seed},
                        {"landscape_samples", s.config.landscape_samples},
                        {"population_size", s.config.ga.population_size},
                        {"generations", s.config.ga.generations},
                        {"crossover_rate", s.config.ga.crossover_rate},
                        {"mutation_rate", s.config.ga.mutation_rate},
                        {"tournament_size", s.config.ga.tournament_size}};
  if (s.config.ga.per_gene_mutation_prob) config["per_gene_mutation_prob"] = *s.config.ga.per_gene_mutation_prob;
  return {{"approaches", approaches}, {"datasets", datasets},   {"repeats", s.repeats},
          {"workers", s.workers},     {"config", config},       {"output_dir", s.output_dir.string()}};
}

ApproachRun run_approach(Approach approach, const LabeledDataset& data, const RunConfig& config) {
  Rng fold_rng(child_seed(config.seed, SeedSlot::folds));
  const auto [fold1, fold2] = stratified_two_folds(data, fold_rng);
  ClusterApp app;
  GaEngine engine(config.ga);
  MetaFeatureExtractor extractor({config.landscape_samples, 0});

  RunConfig cfg = config;
  ApproachRun out;
  switch (approach) {
    case Approach::baseline:
      // the gate can never pass, so the engine runs at every timestep
      cfg.theta_p = 1.01;
      cfg.meta_learner = ml::Kind::knn;
      break;
    case Approach::onmar_knn:
    case Approach::offmar_knn: cfg.meta_learner = ml::Kind::knn; break;
    case Approach::onmar_rf:
    case Approach::offmar_rf: cfg.meta_learner = ml::Kind::rf; break;
    case Approach::onmar_gbt:
    case Approach::offmar_gbt: cfg.meta_learner = ml::Kind::gbt; break;
  }
  const bool offline =
      approach == Approach::offmar_knn || approach == Approach::offmar_rf || approach == Approach::offmar_gbt;
  if (offline) {
    OffmarResult r = offmar_run(cfg, fold1, fold2, app, engine, extractor);
    out.summary = summarize(r.phase2, r.phase1.wall_seconds());
    out.summary.engine_calls = r.phase1.engine_calls();
    out.log = std::move(r.phase2);
    out.phase1 = std::move(r.phase1);
    out.repository = std::move(r.repository);
  } else {
    out.log = onmar_run(cfg, fold2, app, engine, extractor, &out.repository);
    out.summary = summarize(out.log);
  }
  return out;
}

// ---------------------------------------------------------------- reporting

ComparisonReport build_report(const std::vector<std::string>& approaches, const std::vector<std::string>& datasets,
                              int repeats, const std::vector<RunOutcome>& outcomes) {
  ComparisonReport rep;
  rep.approaches = approaches;
  rep.datasets = datasets;
  rep.repeats = repeats;
  const std::size_t na = approaches.size(), nd = datasets.size();
  rep.cells.assign(nd, std::vector<Cell>(na));

  // order samples by repeat so reports do not depend on completion order
  std::vector<const RunOutcome*> sorted;
  for (const auto& o : outcomes) sorted.push_back(&o);
  std::stable_sort(sorted.begin(), sorted.end(), [](const RunOutcome* x, const RunOutcome* y) { return x->repeat < y->repeat; });

  std::vector<std::vector<std::vector<RunSummary>>> summaries(nd, std::vector<std::vector<RunSummary>>(na));
  for (const RunOutcome* o : sorted) {
    if (o->dataset >= nd || o->approach >= na) continue;
    Cell& c = rep.cells[o->dataset][o->approach];
    if (!o->ok) {
      c.errors.push_back("repeat " + std::to_string(o->repeat) + ": " + o->error);
      continue;
    }
    c.final_accuracy.push_back(o->summary.final_accuracy);
    c.wall_seconds.push_back(o->summary.wall_seconds);
    c.engine_calls.push_back(o->summary.engine_calls);
    summaries[o->dataset][o->approach].push_back(o->summary);
  }
  for (auto& row : rep.cells)
    for (auto& c : row) c.complete = c.errors.empty() && c.final_accuracy.size() == static_cast<std::size_t>(repeats);

  rep.pairwise.resize(nd);
  std::vector<std::vector<int>> ranks;
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = a + 1; b < na; ++b) {
        const auto& x = rep.cells[d][a].final_accuracy;
        const auto& y = rep.cells[d][b].final_accuracy;
        if (x.empty() || y.empty()) continue;
        PairwiseTest t{a, b,
                       mann_whitney_u(x, y, Alternative::less).p,
                       mann_whitney_u(x, y, Alternative::greater).p,
                       mann_whitney_u(x, y, Alternative::two_sided).p};
        rep.pairwise[d].push_back(t);
      }
    if (na >= 2) {
      std::vector<std::vector<double>> samples;
      for (std::size_t a = 0; a < na; ++a) samples.push_back(rep.cells[d][a].final_accuracy);
      rep.rankings.push_back(rank_approaches(samples));
      ranks.push_back(rep.rankings.back().rank);
    }
  }
  rep.normalized_rank = normalized_ranks(ranks);
  rep.gain_per_second = accuracy_per_second(summaries);
  return rep;
}

namespace {

nlohmann::json summary_json(const RunSummary& s) {
  return {{"first_accuracy", s.first_accuracy},
          {"final_accuracy", s.final_accuracy},
          {"wall_seconds", s.wall_seconds},
          {"engine_calls", s.engine_calls}};
}

RunSummary summary_from_json(const nlohmann::json& j) {
  return {j.at("first_accuracy").get<double>(), j.at("final_accuracy").get<double>(),
          j.at("wall_seconds").get<double>(), j.at("engine_calls").get<std::size_t>()};
}

fs::path cell_dir(const fs::path& root, const std::string& approach, const std::string& dataset) {
  return root / (approach + "__" + dataset);
}

void write_run_files(const fs::path& dir, int repeat, const ApproachRun& run) {
  const std::string stem = "run_" + std::to_string(repeat);
  {
    std::ofstream out(dir / (stem + ".jsonl"));
    write_runlog(out, run.log);
  }
  if (run.phase1) {
    std::ofstream out(dir / (stem + ".phase1.jsonl"));
    write_runlog(out, *run.phase1);
  }
  std::ofstream trace(dir / (stem + ".per_second.csv"));
  trace << "second,accuracy\n";
  const auto series = accuracy_per_second_trace(run.log, run.phase1 ? run.phase1->wall_seconds() : 0.0);
  for (std::size_t s = 0; s < series.size(); ++s) trace << s << ',' << series[s] << '\n';
}

}  // namespace

ComparisonReport run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  std::vector<std::string> approach_names, dataset_names;
  for (Approach a : spec.approaches) approach_names.push_back(to_string(a));
  for (const auto& d : spec.datasets) dataset_names.push_back(d.name());

  const bool persist = !spec.output_dir.empty();
  if (persist) {
    fs::create_directories(spec.output_dir);
    std::ofstream(spec.output_dir / "spec.json") << to_json(spec).dump(2) << '\n';
    for (const auto& a : approach_names)
      for (const auto& d : dataset_names) fs::create_directories(cell_dir(spec.output_dir, a, d));
  }

  std::vector<RunOutcome> outcomes;
  for (std::size_t d = 0; d < spec.datasets.size(); ++d)
    for (std::size_t a = 0; a < spec.approaches.size(); ++a)
      for (int r = 0; r < spec.repeats; ++r)
        outcomes.push_back(RunOutcome{a, d, r, derive_seed(spec.config.seed, static_cast<std::uint64_t>(r)), false, {}, {}});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < outcomes.size(); i = next++) {
      RunOutcome& o = outcomes[i];
      const std::string& an = approach_names[o.approach];
      const std::string& dn = dataset_names[o.dataset];
      try {
        RunConfig cfg = spec.config;
        cfg.seed = o.seed;
        const LabeledDataset data = materialize(spec.datasets[o.dataset], child_seed(o.seed, SeedSlot::dataset));
        const ApproachRun run = run_approach(spec.approaches[o.approach], data, cfg);
        o.summary = run.summary;
        o.ok = true;
        if (persist) write_run_files(cell_dir(spec.output_dir, an, dn), o.repeat, run);
        spdlog::info("{} on {} repeat {}: final accuracy {:.4f}, {:.2f}s, {} engine calls", an, dn, o.repeat,
                     o.summary.final_accuracy, o.summary.wall_seconds, o.summary.engine_calls);
      } catch (const std::exception& e) {
        o.ok = false;
        o.error = e.what();
        spdlog::error("{} on {} repeat {} failed: {}", an, dn, o.repeat, e.what());
      }
      if (persist) {
        nlohmann::json meta{{"approach", an}, {"dataset", dn},       {"repeat", o.repeat},
                            {"seed", o.seed}, {"ok", o.ok},          {"error", o.error},
                            {"summary", summary_json(o.summary)}};
        std::ofstream(cell_dir(spec.output_dir, an, dn) / ("run_" + std::to_string(o.repeat) + ".meta.json"))
            << meta.dump(2) << '\n';
      }
    }
  };
  const std::size_t n_threads = std::min(spec.workers, outcomes.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ComparisonReport rep = build_report(approach_names, dataset_names, spec.repeats, outcomes);
  if (persist) write_report(rep, spec.output_dir);
  return rep;
}

ComparisonReport aggregate_results(const fs::path& dir) {
  std::ifstream in(dir / "spec.json");
  if (!in) throw std::runtime_error("no spec.json in " + dir.string());
  const ExperimentSpec spec = spec_from_json(nlohmann::json::parse(in));
  std::vector<std::string> approach_names, dataset_names;
  for (Approach a : spec.approaches) approach_names.push_back(to_string(a));
  for (const auto& d : spec.datasets) dataset_names.push_back(d.name());

  std::vector<RunOutcome> outcomes;
  for (std::size_t d = 0; d < dataset_names.size(); ++d)
    for (std::size_t a = 0; a < approach_names.size(); ++a)
      for (int r = 0; r < spec.repeats; ++r) {
        const fs::path meta = cell_dir(dir, approach_names[a], dataset_names[d]) / ("run_" + std::to_string(r) + ".meta.json");
        RunOutcome o{a, d, r, 0, false, "missing " + meta.filename().string(), {}};
        if (std::ifstream m(meta); m) {
          const auto j = nlohmann::json::parse(m);
          o.seed = j.at("seed").get<std::uint64_t>();
          o.ok = j.at("ok").get<bool>();
          o.error = j.at("error").get<std::string>();
          o.summary = summary_from_json(j.at("summary"));
        }
        outcomes.push_back(std::move(o));
      }
  return build_report(approach_names, dataset_names, spec.repeats, outcomes);
}

nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t d = 0; d < r.datasets.size(); ++d)
    for (std::size_t a = 0; a < r.approaches.size(); ++a) {
      const Cell& c = r.cells[d][a];
      cells.push_back({{"dataset", r.datasets[d]},
                       {"approach", r.approaches[a]},
                       {"final_accuracy", c.final_accuracy},
                       {"wall_seconds", c.wall_seconds},
                       {"engine_calls", c.engine_calls},
                       {"complete", c.complete},
                       {"errors", c.errors},
                       {"normalized_gain_per_second",
                        r.gain_per_second[d][a].valid ? nlohmann::json(r.gain_per_second[d][a].value) : nlohmann::json()}});
    }
  nlohmann::json tests = nlohmann::json::array();
  for (std::size_t d = 0; d < r.pairwise.size(); ++d)
    for (const auto& t : r.pairwise[d])
      tests.push_back({{"dataset", r.datasets[d]},
                       {"a", r.approaches[t.a]},
                       {"b", r.approaches[t.b]},
                       {"p_less", t.p_less},
                       {"p_greater", t.p_greater},
                       {"p_two_sided", t.p_two_sided}});
  nlohmann::json ranks = nlohmann::json::array();
  for (std::size_t d = 0; d < r.rankings.size(); ++d)
    ranks.push_back({{"dataset", r.datasets[d]}, {"wins", r.rankings[d].wins}, {"rank", r.rankings[d].rank}});
  return {{"approaches", r.approaches}, {"datasets", r.datasets}, {"repeats", r.repeats},
          {"cells", cells},             {"pairwise", tests},      {"rankings", ranks},
          {"normalized_rank", r.normalized_rank}};
}

void write_report(const ComparisonReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream(dir / "report.json") << to_json(r).dump(2) << '\n';

  std::ofstream runs(dir / "final_accuracy.csv");
  runs << "dataset,approach,sample,final_accuracy,wall_seconds,engine_calls\n";
  for (std::size_t d = 0; d < r.datasets.size(); ++d)
    for (std::size_t a = 0; a < r.approaches.size(); ++a) {
      const Cell& c = r.cells[d][a];
      for (std::size_t i = 0; i < c.final_accuracy.size(); ++i)
        runs << r.datasets[d] << ',' << r.approaches[a] << ',' << i << ',' << c.final_accuracy[i] << ','
             << c.wall_seconds[i] << ',' << c.engine_calls[i] << '\n';
    }

  std::ofstream p(dir / "pvalues.csv");
  p << "dataset,a,b,p_less,p_greater,p_two_sided\n";
  for (std::size_t d = 0; d < r.pairwise.size(); ++d)
    for (const auto& t : r.pairwise[d])
      p << r.datasets[d] << ',' << r.approaches[t.a] << ',' << r.approaches[t.b] << ',' << t.p_less << ','
        << t.p_greater << ',' << t.p_two_sided << '\n';

  std::ofstream rk(dir / "ranks.csv");
  rk << "dataset,approach,wins,rank\n";
  for (std::size_t d = 0; d < r.rankings.size(); ++d)
    for (std::size_t a = 0; a < r.approaches.size(); ++a)
      rk << r.datasets[d] << ',' << r.approaches[a] << ',' << r.rankings[d].wins[a] << ',' << r.rankings[d].rank[a]
         << '\n';
  for (std::size_t a = 0; a < r.normalized_rank.size(); ++a)
    rk << "normalized," << r.approaches[a] << ",," << r.normalized_rank[a] << '\n';

  std::ofstream g(dir / "gain_per_second.csv");
  g << "dataset,approach,normalized_gain\n";
  for (std::size_t d = 0; d < r.datasets.size(); ++d)
    for (std::size_t a = 0; a < r.approaches.size(); ++a) {
      g << r.datasets[d] << ',' << r.approaches[a] << ',';
      if (r.gain_per_second[d][a].valid) g << r.gain_per_second[d][a].value;
      g << '\n';
    }
}

}  // namespace onmar::bench
