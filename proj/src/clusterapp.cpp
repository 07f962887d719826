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

#include "onmar/clusterapp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "onmar/metafeatures.hpp"

namespace onmar {

using kernels::Metric;

const GeneSchema& cluster_schema() {
  static const GeneSchema schema(
      "cluster-v1",
      {
          {"distance", CategoricalGene{{"euclidean", "manhattan", "cosine", "minkowski_p3"}}},
          {"init", CategoricalGene{{"uniform_random", "sample_points", "spread_maximal"}}},
          {"assignment", CategoricalGene{{"hard_nearest", "softmax_weighted"}}},
          {"update", CategoricalGene{{"mean", "median", "online_eta"}}},
          {"k", NumericGene{2.0, 10.0, true}},
          {"eta", NumericGene{0.01, 0.5, false}},
      });
  return schema;
}

ClusterDesign decode(const Design& design) {
  if (const auto err = validation_error(cluster_schema(), design); !err.empty())
    throw std::invalid_argument("decode: " + err);
  const auto& g = design.genes;
  ClusterDesign c;
  c.metric = static_cast<Metric>(static_cast<int>(g[0]));
  c.init = static_cast<InitRule>(static_cast<int>(g[1]));
  c.assign = static_cast<AssignRule>(static_cast<int>(g[2]));
  c.update = static_cast<UpdateRule>(static_cast<int>(g[3]));
  c.k = static_cast<int>(g[4]);
  c.eta = g[5];
  return c;
}

Design encode_design(const ClusterDesign& c) {
  return Design{{static_cast<double>(c.metric), static_cast<double>(c.init), static_cast<double>(c.assign),
                 static_cast<double>(c.update), static_cast<double>(c.k), c.eta},
                cluster_schema().id()};
}

Matrix initial_centroids(const ClusterState& state, const ClusterDesign& design, const LabeledDataset& data) {
  const std::size_t n = data.size();
  const std::size_t d = data.dims();
  const auto k = static_cast<std::size_t>(design.k);
  Rng rng(derive_seed(derive_seed(state.init_seed, static_cast<std::uint64_t>(state.iteration)),
                      k * 8 + static_cast<std::size_t>(design.init)));
  Matrix c(k, d);
  switch (design.init) {
    case InitRule::uniform_random: {
      const auto bounds = ela::feature_bounds(data);
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t f = 0; f < d; ++f) c(j, f) = uniform_real(rng, bounds[f].first, bounds[f].second);
      break;
    }
    case InitRule::sample_points: {
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      // partial Fisher-Yates; falls back to repeats when k > n
      for (std::size_t j = 0; j < k; ++j) {
        std::size_t pick;
        if (j < n) {
          std::swap(idx[j], idx[j + uniform_index(rng, n - j)]);
          pick = idx[j];
        } else {
          pick = uniform_index(rng, n);
        }
        for (std::size_t f = 0; f < d; ++f) c(j, f) = data.features(pick, f);
      }
      break;
    }
    case InitRule::spread_maximal: {
      std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
      std::size_t pick = uniform_index(rng, n);
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t f = 0; f < d; ++f) c(j, f) = data.features(pick, f);
        std::size_t far = 0;
        for (std::size_t i = 0; i < n; ++i) {
          nearest[i] = std::min(nearest[i], kernels::distance(design.metric, data.features.row(i), c.row(j)));
          if (nearest[i] > nearest[far]) far = i;
        }
        pick = far;
      }
      break;
    }
  }
  return c;
}

namespace {

std::vector<int> argmin_rows(const Matrix& dist) {
  std::vector<int> labels(dist.rows());
  for (std::size_t i = 0; i < dist.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < dist.cols(); ++j)
      if (dist(i, j) < dist(i, best)) best = j;
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

// Moves each empty cluster's centroid onto the point farthest from its nearest
// centroid, then reassigns. Repeats while that keeps emptying other clusters.
void repair_empty(Matrix& centroids, Matrix& dist, std::vector<int>& labels, const LabeledDataset& data,
                  Metric metric) {
  const std::size_t n = data.size();
  const std::size_t k = centroids.rows();
  if (n < k) return;
  for (std::size_t round = 0; round < k; ++round) {
    std::vector<std::size_t> counts(k, 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    bool changed = false;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double m = dist(i, static_cast<std::size_t>(labels[i]));
        if (m > far_d) {
          far_d = m;
          far = i;
        }
      }
      for (std::size_t f = 0; f < centroids.cols(); ++f) centroids(c, f) = data.features(far, f);
      for (std::size_t i = 0; i < n; ++i) dist(i, c) = kernels::distance(metric, data.features.row(i), centroids.row(c));
      labels = argmin_rows(dist);
      for (auto& v : counts) v = 0;
      for (int l : labels) ++counts[static_cast<std::size_t>(l)];
      changed = true;
    }
    if (!changed) return;
  }
}

double median_of(std::vector<double>& v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  const double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return lo + (hi - lo) / 2.0;
}

}  // namespace

double app_step(ClusterState& state, const ClusterDesign& design, const LabeledDataset& data, kernels::Exec exec) {
  if (design.k < 1) throw std::invalid_argument("app_step: k must be positive");
  const std::size_t n = data.size();
  const std::size_t d = data.dims();
  const auto k = static_cast<std::size_t>(design.k);
  auto& cl = state.clustering;
  if (cl.k != design.k || cl.centroids.rows() != k) {
    cl.centroids = initial_centroids(state, design, data);
    cl.k = design.k;
  }

  Matrix dist = kernels::distance_matrix(data.features, cl.centroids, design.metric, exec);
  std::vector<int> labels = argmin_rows(dist);
  repair_empty(cl.centroids, dist, labels, data, design.metric);

  // membership weights: one-hot for hard assignment, softmax of negative
  // scaled distance otherwise
  Matrix weight(n, k);
  if (design.assign == AssignRule::softmax_weighted) {
    double mean_min = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_min += dist(i, static_cast<std::size_t>(labels[i]));
    mean_min /= static_cast<double>(n);
    const double beta = mean_min > 0.0 ? 1.0 / mean_min : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dmin = dist(i, static_cast<std::size_t>(labels[i]));
      double z = 0.0;
      for (std::size_t j = 0; j < k; ++j) z += weight(i, j) = std::exp(-beta * (dist(i, j) - dmin));
      for (std::size_t j = 0; j < k; ++j) weight(i, j) /= z;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) weight(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }

  Matrix next = cl.centroids;
  std::vector<double> column;
  for (std::size_t j = 0; j < k; ++j) {
    if (design.update == UpdateRule::median) {
      for (std::size_t f = 0; f < d; ++f) {
        column.clear();
        for (std::size_t i = 0; i < n; ++i)
          if (labels[i] == static_cast<int>(j)) column.push_back(data.features(i, f));
        if (column.empty()) break;
        next(j, f) = median_of(column);
      }
      continue;
    }
    double wsum = 0.0;
    std::vector<double> acc(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = weight(i, j);
      if (w == 0.0) continue;
      wsum += w;
      for (std::size_t f = 0; f < d; ++f) acc[f] += w * data.features(i, f);
    }
    if (wsum <= 0.0) continue;
    for (std::size_t f = 0; f < d; ++f) {
      const double m = acc[f] / wsum;
      next(j, f) = design.update == UpdateRule::online_eta ? cl.centroids(j, f) + design.eta * (m - cl.centroids(j, f)) : m;
    }
  }
  cl.centroids = std::move(next);
  cl.assignments = std::move(labels);
  ++state.iteration;
  return metrics::clustering_accuracy(cl.assignments, data.labels);
}

double app_step(ClusterState& state, const Design& design, const LabeledDataset& data, kernels::Exec exec) {
  return app_step(state, decode(design), data, exec);
}

double ga_fitness_for_timestep(const Design& design, const ClusterState& state, const LabeledDataset& data) {
  ClusterState copy = state;
  return app_step(copy, design, data);
}

const FeatureNames& cluster_feature_names() {
  static const FeatureNames names = {
      "clu.ari", "clu.ami", "clu.homogeneity", "clu.completeness", "clu.v_measure", "clu.fowlkes_mallows",
      "clu.silhouette", "clu.davies_bouldin", "clu.calinski_harabasz",
      "clu.pairs.same_same", "clu.pairs.same_diff", "clu.pairs.diff_same", "clu.pairs.diff_diff",
      "clu.contingency.max", "clu.contingency.mean", "clu.contingency.entropy",
      "clu.pmf.bernoulli", "clu.pmf.laplacian", "clu.pmf.zeta", "clu.pmf.poisson", "clu.pmf.planck",
      "clu.pmf.logarithmic_series", "clu.pmf.yule_simon",
      "clu.centroid.cosine", "clu.centroid.euclidean", "clu.centroid.minkowski_p3", "clu.centroid.manhattan",
      "clu.centroid.hamming",
      "clu.accuracy",
  };
  return names;
}

void ClusterApp::reset(const LabeledDataset& data, std::uint64_t seed) {
  validate(data);
  data_ = data;
  state_ = ClusterState{};
  state_.init_seed = seed;
  current_.reset();
}

double ClusterApp::exec(const Design& design, int /*timestep*/) {
  const ClusterDesign c = decode(design);
  const double p = app_step(state_, c, data_);
  current_ = c;
  return p;
}

double ClusterApp::evaluate(const Design& design) const { return ga_fitness_for_timestep(design, state_, data_); }

LandscapeSample ClusterApp::sample_landscape(std::size_t n_samples, Rng& rng) const {
  int k;
  Metric metric;
  if (current_) {
    k = current_->k;
    metric = current_->metric;
  } else {
    k = std::clamp(data_.classes(), 2, 10);
    metric = Metric::euclidean;
  }
  return ela::build_landscape(data_, k, metric, n_samples, rng, kernels::Exec::parallel);
}

void ClusterApp::specific_features(FeatureBlock& out) const {
  const auto& names = cluster_feature_names();
  if (state_.clustering.k == 0) {
    for (const auto& n : names) out.add(n, 0.0, false);
    return;
  }
  const auto& pred = state_.clustering.assignments;
  const auto& truth = data_.labels;
  std::size_t i = 0;
  auto put = [&](double v, bool valid = true) { out.add(names[i++], v, valid); };
  auto put_scored = [&](Scored s) { out.add(names[i++], s); };

  const auto ext = metrics::external_scores(pred, truth);
  put(ext.ari);
  put(ext.ami);
  put(ext.homogeneity);
  put(ext.completeness);
  put(ext.v_measure);
  put(ext.fowlkes_mallows);

  const auto in = metrics::internal_scores(data_.features, pred, kernels::Exec::parallel);
  put_scored(in.silhouette);
  put_scored(in.davies_bouldin);
  put_scored(in.calinski_harabasz);

  const auto pc = metrics::pair_confusion(pred, truth);
  const double pairs = static_cast<double>(data_.size()) * static_cast<double>(data_.size() - 1) / 2.0;
  put(static_cast<double>(pc[0][0]) / pairs);
  put(static_cast<double>(pc[0][1]) / pairs);
  put(static_cast<double>(pc[1][0]) / pairs);
  put(static_cast<double>(pc[1][1]) / pairs);

  const auto ct = metrics::intersection_cardinalities(pred, truth);
  put(ct.max);
  put(ct.mean);
  put(ct.entropy);

  const auto pmf = metrics::pmf_features(pred);
  put_scored(pmf.bernoulli);
  put_scored(pmf.laplacian);
  put_scored(pmf.zeta);
  put_scored(pmf.poisson);
  put_scored(pmf.planck);
  put_scored(pmf.logarithmic_series);
  put_scored(pmf.yule_simon);

  const auto cd = metrics::centroid_distance_features(state_.clustering.centroids);
  put_scored(cd.cosine);
  put_scored(cd.euclidean);
  put_scored(cd.minkowski_p3);
  put_scored(cd.manhattan);
  put_scored(cd.hamming);

  put(metrics::clustering_accuracy(pred, truth));
}

}  // namespace onmar
