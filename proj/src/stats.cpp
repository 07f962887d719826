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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "onmar/bench.hpp"

namespace onmar::bench {

std::vector<double> mwu_null_counts(std::size_t n_a, std::size_t n_b) {
  // f[i][j][u]: arrangements of i a-values and j b-values with statistic u;
  // the largest value is either an a (adds j to U) or a b.
  const std::size_t max_u = n_a * n_b;
  std::vector<std::vector<std::vector<double>>> f(n_a + 1, std::vector<std::vector<double>>(n_b + 1));
  for (std::size_t i = 0; i <= n_a; ++i)
    for (std::size_t j = 0; j <= n_b; ++j) {
      auto& cur = f[i][j];
      cur.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        cur[0] = 1.0;
        continue;
      }
      const auto& with_a = f[i - 1][j];
      const auto& with_b = f[i][j - 1];
      for (std::size_t u = 0; u < with_a.size(); ++u) cur[u + j] += with_a[u];
      for (std::size_t u = 0; u < with_b.size(); ++u) cur[u] += with_b[u];
    }
  auto out = f[n_a][n_b];
  out.resize(max_u + 1, 0.0);
  return out;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<std::pair<double, int>> all;
  all.reserve(n);
  for (double v : a) all.emplace_back(v, 0);
  for (double v : b) all.emplace_back(v, 1);
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && all[j].first == all[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t m = i; m < j; ++m)
      if (all[m].second == 0) rank_sum_a += mid;
    if (t > 1.0) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }

  MwuResult r;
  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb), dn = static_cast<double>(n);
  r.u_a = rank_sum_a - dna * (dna + 1.0) / 2.0;
  r.u_b = dna * dnb - r.u_a;

  if (n <= 12 && !ties) {
    r.exact = true;
    const auto counts = mwu_null_counts(na, nb);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto u = static_cast<std::size_t>(std::llround(r.u_a));
    double lower = 0.0, upper = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (k <= u) lower += counts[k];
      if (k >= u) upper += counts[k];
    }
    lower /= total;
    upper /= total;
    switch (alternative) {
      case Alternative::less: r.p = lower; break;
      case Alternative::greater: r.p = upper; break;
      case Alternative::two_sided: r.p = std::min(1.0, 2.0 * std::min(lower, upper)); break;
    }
    return r;
  }

  const double mu = dna * dnb / 2.0;
  const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(var > 0.0)) {
    r.p = 1.0;
    return r;
  }
  const double sd = std::sqrt(var);
  switch (alternative) {
    case Alternative::less: r.p = normal_cdf((r.u_a - mu + 0.5) / sd); break;
    case Alternative::greater: r.p = 1.0 - normal_cdf((r.u_a - mu - 0.5) / sd); break;
    case Alternative::two_sided: {
      const double z = (std::max(r.u_a, r.u_b) - mu - 0.5) / sd;
      r.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
      break;
    }
  }
  r.p = std::clamp(r.p, 0.0, 1.0);
  return r;
}

namespace {

std::vector<int> dense_rank_desc(const std::vector<double>& score) {
  std::vector<double> distinct = score;
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> rank(score.size());
  for (std::size_t i = 0; i < score.size(); ++i)
    rank[i] = static_cast<int>(std::find(distinct.begin(), distinct.end(), score[i]) - distinct.begin()) + 1;
  return rank;
}

}  // namespace

Ranking rank_approaches(const std::vector<std::vector<double>>& samples, double alpha) {
  const std::size_t m = samples.size();
  Ranking r;
  r.wins.assign(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (samples[i].empty() || samples[j].empty()) continue;
      if (mann_whitney_u(samples[i], samples[j], Alternative::two_sided).p >= alpha) continue;
      if (mann_whitney_u(samples[i], samples[j], Alternative::greater).p < alpha) ++r.wins[i];
      else if (mann_whitney_u(samples[i], samples[j], Alternative::less).p < alpha) ++r.wins[j];
    }
  std::vector<double> score(r.wins.begin(), r.wins.end());
  r.rank = dense_rank_desc(score);
  return r;
}

std::vector<int> normalized_ranks(const std::vector<std::vector<int>>& ranks) {
  if (ranks.empty()) return {};
  const std::size_t m = ranks.front().size();
  std::vector<double> neg_mean(m, 0.0);
  for (const auto& row : ranks) {
    if (row.size() != m) throw std::invalid_argument("normalized_ranks: ragged rank table");
    for (std::size_t i = 0; i < m; ++i) neg_mean[i] -= static_cast<double>(row[i]);
  }
  for (auto& v : neg_mean) v /= static_cast<double>(ranks.size());
  return dense_rank_desc(neg_mean);
}

RunSummary summarize(const RunLog& log, double extra_seconds) {
  RunSummary s;
  if (!log.records.empty()) {
    s.first_accuracy = log.records.front().actual_performance;
    s.final_accuracy = log.records.back().actual_performance;
  }
  s.wall_seconds = log.wall_seconds() + extra_seconds;
  s.engine_calls = log.engine_calls();
  return s;
}

Scored gain_per_second(const RunSummary& run) {
  if (!(run.wall_seconds > 0.0)) return Scored::undefined();
  return {(run.final_accuracy - run.first_accuracy) / run.wall_seconds, true};
}

std::vector<double> accuracy_per_second_trace(const RunLog& log, double offset) {
  const double total = log.wall_seconds() + offset;
  const auto seconds = static_cast<std::size_t>(std::ceil(total));
  std::vector<double> out(seconds + 1, 0.0);
  std::size_t next = 0;
  double current = 0.0;
  for (std::size_t s = 0; s <= seconds; ++s) {
    while (next < log.records.size() && log.records[next].elapsed_wall_seconds + offset <= static_cast<double>(s))
      current = log.records[next++].actual_performance;
    out[s] = current;
  }
  return out;
}

std::vector<std::vector<Scored>> accuracy_per_second(const std::vector<std::vector<std::vector<RunSummary>>>& runs) {
  std::vector<std::vector<Scored>> out(runs.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < runs.size(); ++d) {
    out[d].resize(runs[d].size(), Scored::undefined());
    for (std::size_t a = 0; a < runs[d].size(); ++a) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& r : runs[d][a]) {
        const Scored g = gain_per_second(r);
        if (!g.valid) continue;
        sum += g.value;
        ++n;
      }
      if (n == 0) continue;
      out[d][a] = {sum / static_cast<double>(n), true};
      lo = std::min(lo, out[d][a].value);
      hi = std::max(hi, out[d][a].value);
    }
  }
  for (auto& row : out)
    for (auto& c : row)
      if (c.valid) c.value = hi > lo ? (c.value - lo) / (hi - lo) : 0.0;
  return out;
}

Divergence diagnostics_predicted_vs_actual(const RunLog& log, double delta, int window) {
  if (window < 1) throw std::invalid_argument("diagnostics: window must be positive");
  Divergence d;
  d.gap.reserve(log.records.size());
  int streak = 0;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    if (r.predicted_performance) d.gap.emplace_back(*r.predicted_performance - r.actual_performance);
    else d.gap.emplace_back(std::nullopt);
    const bool bad = r.predicted_performance && !r.ga_invoked && *d.gap.back() > delta;
    streak = bad ? streak + 1 : 0;
    if (streak >= window && !d.flagged) {
      d.flagged = true;
      d.first_flagged_timestep = log.records[i + 1 - static_cast<std::size_t>(window)].timestep;
    }
  }
  return d;
}

}  // namespace onmar::bench
