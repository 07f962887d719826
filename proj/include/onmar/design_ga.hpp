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

// Genetic-algorithm design engine over Design chromosomes.

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "onmar/design.hpp"

namespace onmar {

struct GaParams {
  std::size_t population_size = 70;
  std::size_t generations = 50;
  double crossover_rate = 0.75;
  double mutation_rate = 0.25;
  std::size_t tournament_size = 2;
  /// Probability that a mutated individual has a given gene re-sampled.
  /// Unset means 1 / chromosome length.
  std::optional<double> per_gene_mutation_prob;
  /// Evaluate each generation's fitness with OpenMP.
  bool parallel_fitness = false;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const GaParams& params);

using Population = std::vector<Design>;
using FitnessFn = std::function<double(const Design&)>;

struct EvolveResult {
  Design best;
  double best_fitness = 0.0;
  Population population;
  /// Best-ever fitness after the initial population and after each generation.
  std::vector<double> best_history;
  std::size_t evaluations = 0;
  std::size_t failed_evaluations = 0;
};

/// Sampled with replacement; the fittest sampled entry wins, ties to the
/// lowest index. Returns the winning index.
std::size_t tournament_select(std::span<const double> fitnesses, std::size_t tournament_size, Rng& rng);

/// Swaps the tails after a uniform cut in 1..len-1. Length-1 chromosomes are
/// returned unchanged.
std::pair<Design, Design> single_point_crossover(const Design& a, const Design& b, Rng& rng);

Design mutate(const Design& d, const GeneSchema& schema, double per_gene_prob, Rng& rng);

/// Runs the GA. A fitness that throws or falls outside [0, 1] scores 0.
/// `warm_start` seeds the initial population (truncated or topped up with
/// random individuals to population_size).
EvolveResult evolve(const GeneSchema& schema, const FitnessFn& fitness, const GaParams& params, Rng& rng,
                    const Population* warm_start = nullptr);

/// Produces a design for the current application state.
class DesignEngine {
 public:
  virtual ~DesignEngine() = default;
  virtual void reset(std::uint64_t seed) = 0;
  virtual Design design(const GeneSchema& schema, const FitnessFn& fitness, int timestep) = 0;
  virtual std::size_t invocations() const = 0;
};

/// GA engine that carries its final population into the next invocation.
class GaEngine final : public DesignEngine {
 public:
  explicit GaEngine(GaParams params = {});

  void reset(std::uint64_t seed) override;
  Design design(const GeneSchema& schema, const FitnessFn& fitness, int timestep) override;
  std::size_t invocations() const override { return invocations_; }

  const GaParams& params() const { return params_; }
  const Population& population() const { return population_; }

 private:
  GaParams params_;
  std::uint64_t seed_ = 0;
  Population population_;
  std::size_t invocations_ = 0;
};

}  // namespace onmar
