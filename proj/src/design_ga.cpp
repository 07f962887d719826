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

#include "onmar/design_ga.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace onmar {

void validate(const GaParams& p) {
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument(std::string("GaParams.") + name + " must lie in [0, 1]");
  };
  if (p.population_size < 2) throw std::invalid_argument("GaParams.population_size must be at least 2");
  if (p.tournament_size < 1) throw std::invalid_argument("GaParams.tournament_size must be at least 1");
  rate(p.crossover_rate, "crossover_rate");
  rate(p.mutation_rate, "mutation_rate");
  if (p.per_gene_mutation_prob) rate(*p.per_gene_mutation_prob, "per_gene_mutation_prob");
}

std::size_t tournament_select(std::span<const double> fitnesses, std::size_t tournament_size, Rng& rng) {
  if (fitnesses.empty()) throw std::invalid_argument("tournament_select: empty population");
  std::size_t best = uniform_index(rng, fitnesses.size());
  for (std::size_t i = 1; i < tournament_size; ++i) {
    const std::size_t c = uniform_index(rng, fitnesses.size());
    if (fitnesses[c] > fitnesses[best] || (fitnesses[c] == fitnesses[best] && c < best)) best = c;
  }
  return best;
}

std::pair<Design, Design> single_point_crossover(const Design& a, const Design& b, Rng& rng) {
  if (a.genes.size() != b.genes.size() || a.schema_id != b.schema_id)
    throw std::invalid_argument("single_point_crossover: parents from different schemas");
  const std::size_t len = a.genes.size();
  if (len < 2) return {a, b};
  const std::size_t x = 1 + uniform_index(rng, len - 1);
  Design c1 = a, c2 = b;
  for (std::size_t i = x; i < len; ++i) std::swap(c1.genes[i], c2.genes[i]);
  return {std::move(c1), std::move(c2)};
}

Design mutate(const Design& d, const GeneSchema& schema, double per_gene_prob, Rng& rng) {
  if (d.genes.size() != schema.size()) throw std::invalid_argument("mutate: gene count mismatch");
  Design out = d;
  for (std::size_t i = 0; i < out.genes.size(); ++i)
    if (uniform01(rng) < per_gene_prob) out.genes[i] = random_gene(schema[i], rng);
  return out;
}

namespace {

struct Scorer {
  const FitnessFn& fitness;
  bool parallel;
  std::map<Design, double> cache;
  std::size_t evaluations = 0;
  std::size_t failures = 0;

  static double safe_call(const FitnessFn& f, const Design& d, bool& failed) {
    failed = false;
    try {
      const double v = f(d);
      if (std::isfinite(v) && v >= 0.0 && v <= 1.0) return v;
    } catch (const std::exception&) {
    }
    failed = true;
    return 0.0;
  }

  // Fitness is a pure function of the design, so repeated designs reuse the
  // cached score.
  std::vector<double> score(const Population& pop) {
    std::vector<const Design*> pending;
    for (const auto& d : pop)
      if (!cache.contains(d) &&
          std::none_of(pending.begin(), pending.end(), [&](const Design* p) { return *p == d; }))
        pending.push_back(&d);

    std::vector<double> values(pending.size());
    std::vector<char> failed(pending.size(), 0);
    const auto n = static_cast<std::ptrdiff_t>(pending.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        bool f = false;
        values[static_cast<std::size_t>(i)] = safe_call(fitness, *pending[static_cast<std::size_t>(i)], f);
        failed[static_cast<std::size_t>(i)] = f ? 1 : 0;
      }
    } else {
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        bool f = false;
        values[static_cast<std::size_t>(i)] = safe_call(fitness, *pending[static_cast<std::size_t>(i)], f);
        failed[static_cast<std::size_t>(i)] = f ? 1 : 0;
      }
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
      cache.emplace(*pending[i], values[i]);
      failures += static_cast<std::size_t>(failed[i]);
    }
    evaluations += pending.size();

    std::vector<double> out;
    out.reserve(pop.size());
    for (const auto& d : pop) out.push_back(cache.at(d));
    return out;
  }
};

std::size_t argmax_first(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

EvolveResult evolve(const GeneSchema& schema, const FitnessFn& fitness, const GaParams& params, Rng& rng,
                    const Population* warm_start) {
  validate(params);
  const double per_gene = params.per_gene_mutation_prob.value_or(1.0 / static_cast<double>(schema.size()));

  Population pop;
  pop.reserve(params.population_size);
  if (warm_start) {
    for (const auto& d : *warm_start) {
      if (pop.size() == params.population_size) break;
      if (d.schema_id != schema.id() || d.genes.size() != schema.size()) continue;
      Design r = d;
      repair(schema, r);
      pop.push_back(std::move(r));
    }
  }
  while (pop.size() < params.population_size) pop.push_back(random_design(schema, rng));

  Scorer scorer{fitness, params.parallel_fitness, {}};
  std::vector<double> fit = scorer.score(pop);

  EvolveResult result;
  std::size_t b = argmax_first(fit);
  result.best = pop[b];
  result.best_fitness = fit[b];
  result.best_history.push_back(result.best_fitness);

  for (std::size_t g = 0; g < params.generations; ++g) {
    Population next;
    next.reserve(params.population_size);
    next.push_back(pop[argmax_first(fit)]);
    while (next.size() < params.population_size) {
      const Design& pa = pop[tournament_select(fit, params.tournament_size, rng)];
      const Design& pb = pop[tournament_select(fit, params.tournament_size, rng)];
      auto children = uniform01(rng) < params.crossover_rate ? single_point_crossover(pa, pb, rng)
                                                             : std::pair<Design, Design>{pa, pb};
      for (Design* child : {&children.first, &children.second}) {
        if (next.size() == params.population_size) break;
        if (uniform01(rng) < params.mutation_rate) *child = mutate(*child, schema, per_gene, rng);
        if (!is_valid(schema, *child)) throw std::logic_error("evolve: operator produced " + validation_error(schema, *child));
        next.push_back(std::move(*child));
      }
    }
    pop = std::move(next);
    fit = scorer.score(pop);
    b = argmax_first(fit);
    if (fit[b] > result.best_fitness) {
      result.best = pop[b];
      result.best_fitness = fit[b];
    }
    result.best_history.push_back(result.best_fitness);
  }

  if (scorer.failures > 0)
    spdlog::warn("evolve: {} of {} fitness evaluations failed and scored 0", scorer.failures, scorer.evaluations);
  result.population = std::move(pop);
  result.evaluations = scorer.evaluations;
  result.failed_evaluations = scorer.failures;
  return result;
}

GaEngine::GaEngine(GaParams params) : params_(std::move(params)) { validate(params_); }

void GaEngine::reset(std::uint64_t seed) {
  seed_ = seed;
  population_.clear();
  invocations_ = 0;
}

Design GaEngine::design(const GeneSchema& schema, const FitnessFn& fitness, int timestep) {
  Rng rng(derive_seed(seed_, static_cast<std::uint64_t>(timestep)));
  auto result = evolve(schema, fitness, params_, rng, population_.empty() ? nullptr : &population_);
  population_ = std::move(result.population);
  ++invocations_;
  return result.best;
}

}  // namespace onmar
