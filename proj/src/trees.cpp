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

#include "onmar/metalearners.hpp"

namespace onmar::ml {

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

namespace {

// Target statistics for one side of a candidate split.
struct RegressionStats {
  double sum = 0.0;
  double count = 0.0;

  void add(double y) {
    sum += y;
    count += 1.0;
  }
  void remove(double y) {
    sum -= y;
    count -= 1.0;
  }
  // Proportional to the reduction in squared error achievable at this node.
  double score() const { return count > 0.0 ? sum * sum / count : 0.0; }
};

struct ClassStats {
  std::vector<double> counts;
  double sumsq = 0.0;
  double count = 0.0;

  explicit ClassStats(int n_classes = 0) : counts(static_cast<std::size_t>(n_classes), 0.0) {}
  void add(int c) {
    double& v = counts[static_cast<std::size_t>(c)];
    sumsq += 2.0 * v + 1.0;
    v += 1.0;
    count += 1.0;
  }
  void remove(int c) {
    double& v = counts[static_cast<std::size_t>(c)];
    sumsq -= 2.0 * v - 1.0;
    v -= 1.0;
    count -= 1.0;
  }
  double score() const { return count > 0.0 ? sumsq / count : 0.0; }
};

// Presorted exact-greedy CART. `order[f]` lists the node's sample positions
// sorted by feature f; children inherit stable partitions of those lists.
}  // namespace

std::vector<std::vector<std::size_t>> presort(const Matrix& x, std::span<const std::size_t> sample) {
  std::vector<std::vector<std::size_t>> order(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& o = order[f];
    o.resize(sample.size());
    std::iota(o.begin(), o.end(), std::size_t{0});
    std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return x(sample[a], f) < x(sample[b], f); });
  }
  return order;
}

std::vector<std::vector<std::size_t>> expand_presort(const std::vector<std::vector<std::size_t>>& row_order,
                                                     std::span<const std::size_t> sample, std::size_t n_rows) {
  // positions of each row within the sample, ascending
  std::vector<std::size_t> start(n_rows + 1, 0);
  for (std::size_t r : sample) ++start[r + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::size_t> positions(sample.size()), fill(start.begin(), start.end() - 1);
  for (std::size_t pos = 0; pos < sample.size(); ++pos) positions[fill[sample[pos]]++] = pos;

  std::vector<std::vector<std::size_t>> order(row_order.size());
  for (std::size_t f = 0; f < row_order.size(); ++f) {
    auto& o = order[f];
    o.reserve(sample.size());
    for (std::size_t r : row_order[f])
      for (std::size_t i = start[r]; i < start[r + 1]; ++i) o.push_back(positions[i]);
  }
  return order;
}

namespace {

template <typename Target, typename Stats>
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const Target> target, std::span<const std::size_t> sample,
              const TreeParams& params, Rng& rng, Stats empty)
      : x_(x), target_(target), sample_(sample), params_(params), rng_(rng), empty_(std::move(empty)) {}

  Tree build() { return build(presort(x_, sample_)); }

  Tree build(std::vector<std::vector<std::size_t>> order) {
    std::vector<std::size_t> members(sample_.size());
    std::iota(members.begin(), members.end(), std::size_t{0});
    grow(std::move(members), std::move(order), 0);
    return std::move(tree_);
  }

 private:
  double value(std::size_t pos, std::size_t f) const { return x_(sample_[pos], f); }
  Target target(std::size_t pos) const { return target_[sample_[pos]]; }

  int grow(std::vector<std::size_t> members, std::vector<std::vector<std::size_t>> order, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    Stats total = empty_;
    for (std::size_t pos : members) total.add(target(pos));
    tree_.nodes[static_cast<std::size_t>(id)].value = leaf_value(total, members);

    if (depth >= params_.max_depth || members.size() < 2 || x_.cols() == 0) return id;

    const std::vector<std::size_t> candidates = candidate_features();
    const double parent = total.score();
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    for (std::size_t f : candidates) {
      const auto& o = order[f];
      Stats left = empty_;
      Stats right = total;
      for (std::size_t i = 0; i + 1 < o.size(); ++i) {
        const Target t = target(o[i]);
        left.add(t);
        right.remove(t);
        const double a = value(o[i], f);
        const double b = value(o[i + 1], f);
        if (!(a < b)) continue;
        const double gain = left.score() + right.score() - parent;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          double mid = a + (b - a) / 2.0;
          if (!(mid < b)) mid = a;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return id;

    const auto bf = static_cast<std::size_t>(best_feature);
    std::vector<char> goes_left(sample_.size(), 0);
    std::vector<std::size_t> left_members, right_members;
    for (std::size_t pos : members) {
      if (value(pos, bf) <= best_threshold) {
        goes_left[pos] = 1;
        left_members.push_back(pos);
      } else {
        right_members.push_back(pos);
      }
    }
    std::vector<std::vector<std::size_t>> left_order(order.size()), right_order(order.size());
    for (std::size_t f = 0; f < order.size(); ++f) {
      left_order[f].reserve(left_members.size());
      right_order[f].reserve(right_members.size());
      for (std::size_t pos : order[f]) (goes_left[pos] ? left_order[f] : right_order[f]).push_back(pos);
    }
    order.clear();
    order.shrink_to_fit();

    const int l = grow(std::move(left_members), std::move(left_order), depth + 1);
    const int r = grow(std::move(right_members), std::move(right_order), depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> all(x_.cols());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const std::size_t m = params_.max_features;
    if (m == 0 || m >= all.size()) return all;
    // partial Fisher-Yates, then restore ascending order for deterministic tie-breaking
    for (std::size_t i = 0; i < m; ++i) std::swap(all[i], all[i + uniform_index(rng_, all.size() - i)]);
    all.resize(m);
    std::sort(all.begin(), all.end());
    return all;
  }

  double leaf_value(const Stats& s, const std::vector<std::size_t>& members) const {
    if constexpr (std::is_same_v<Stats, RegressionStats>) {
      (void)members;
      return s.count > 0.0 ? s.sum / s.count : 0.0;
    } else {
      (void)members;
      const auto it = std::max_element(s.counts.begin(), s.counts.end());
      return static_cast<double>(it - s.counts.begin());
    }
  }

  const Matrix& x_;
  std::span<const Target> target_;
  std::span<const std::size_t> sample_;
  const TreeParams& params_;
  Rng& rng_;
  Stats empty_;
  Tree tree_;
};

}  // namespace

Tree build_regression_tree(const Matrix& x, std::span<const double> y, std::span<const std::size_t> sample,
                           const TreeParams& params, Rng& rng) {
  if (y.size() != x.rows()) throw std::invalid_argument("build_regression_tree: target length mismatch");
  if (sample.empty()) throw std::invalid_argument("build_regression_tree: empty sample");
  return TreeBuilder<double, RegressionStats>(x, y, sample, params, rng, RegressionStats{}).build();
}

Tree build_regression_tree(const Matrix& x, std::span<const double> y, std::span<const std::size_t> sample,
                           const std::vector<std::vector<std::size_t>>& order, const TreeParams& params, Rng& rng) {
  if (y.size() != x.rows()) throw std::invalid_argument("build_regression_tree: target length mismatch");
  if (sample.empty()) throw std::invalid_argument("build_regression_tree: empty sample");
  if (order.size() != x.cols()) throw std::invalid_argument("build_regression_tree: presort width mismatch");
  return TreeBuilder<double, RegressionStats>(x, y, sample, params, rng, RegressionStats{}).build(order);
}

Tree build_classification_tree(const Matrix& x, std::span<const int> cls, int n_classes,
                               std::span<const std::size_t> sample, const TreeParams& params, Rng& rng) {
  if (cls.size() != x.rows()) throw std::invalid_argument("build_classification_tree: target length mismatch");
  if (sample.empty()) throw std::invalid_argument("build_classification_tree: empty sample");
  return TreeBuilder<int, ClassStats>(x, cls, sample, params, rng, ClassStats(n_classes)).build();
}

Tree build_classification_tree(const Matrix& x, std::span<const int> cls, int n_classes,
                               std::span<const std::size_t> sample, const std::vector<std::vector<std::size_t>>& order,
                               const TreeParams& params, Rng& rng) {
  if (cls.size() != x.rows()) throw std::invalid_argument("build_classification_tree: target length mismatch");
  if (sample.empty()) throw std::invalid_argument("build_classification_tree: empty sample");
  if (order.size() != x.cols()) throw std::invalid_argument("build_classification_tree: presort width mismatch");
  return TreeBuilder<int, ClassStats>(x, cls, sample, params, rng, ClassStats(n_classes)).build(order);
}

double Booster::predict(std::span<const double> x) const { return predict(x, trees.size()); }

double Booster::predict(std::span<const double> x, std::size_t rounds) const {
  double out = base;
  for (std::size_t r = 0; r < std::min(rounds, trees.size()); ++r) out += learning_rate * trees[r].predict(x);
  return out;
}

}  // namespace onmar::ml
