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

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "onmar/metafeatures.hpp"

namespace onmar::ela {

Matrix latin_hypercube_sample(std::size_t n_samples, const Bounds& bounds, Rng& rng) {
  if (n_samples == 0) throw std::invalid_argument("latin_hypercube_sample: n_samples must be positive");
  for (const auto& [lo, hi] : bounds)
    if (!(lo < hi)) throw std::invalid_argument("latin_hypercube_sample: degenerate bounds");

  const std::size_t d = bounds.size();
  const double n = static_cast<double>(n_samples);
  Matrix out(n_samples, d);
  std::vector<std::size_t> strata(n_samples);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    shuffle(strata, rng);
    const auto [lo, hi] = bounds[j];
    const double width = hi - lo;
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double s = static_cast<double>(strata[i]);
      double x = lo + width * (s + uniform01(rng)) / n;
      // rounding can push a point across the upper stratum edge
      const double upper = lo + width * (s + 1.0) / n;
      while (x >= upper || std::floor((x - lo) / width * n) > s) x = std::nextafter(x, lo);
      while (std::floor((x - lo) / width * n) < s) x = std::nextafter(x, hi);
      out(i, j) = x;
    }
  }
  return out;
}

}  // namespace onmar::ela
