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
#include <map>
#include <numeric>
#include <stdexcept>

#include "ml_internal.hpp"

namespace onmar::ml {

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::knn: return "knn";
    case Kind::rf: return "rf";
    case Kind::gbt: return "gbt";
  }
  return "?";
}

Kind kind_from_string(const std::string& s) {
  if (s == "knn") return Kind::knn;
  if (s == "rf") return Kind::rf;
  if (s == "gbt" || s == "xgb") return Kind::gbt;
  throw std::invalid_argument("unknown meta-learner kind '" + s + "'");
}

TrainingMatrix regression_matrix(const KnowledgeRepository& kr, const GeneSchema& schema) {
  TrainingMatrix m;
  m.mode = Mode::regress_performance;
  std::vector<double> row;
  for (const auto& e : kr) {
    row = e.meta_features.values;
    const auto enc = encode(schema, e.design);
    row.insert(row.end(), enc.begin(), enc.end());
    m.features.push_row(row);
    m.targets.push_back(e.performance);
  }
  return m;
}

TrainingMatrix design_matrix(const KnowledgeRepository& kr) {
  TrainingMatrix m;
  m.mode = Mode::predict_design;
  std::map<Design, int> ids;
  for (const auto& e : kr) {
    const auto [it, inserted] = ids.emplace(e.design, static_cast<int>(m.designs.size()));
    if (inserted) m.designs.push_back(e.design);
    m.features.push_row(e.meta_features.values);
    m.classes.push_back(it->second);
  }
  return m;
}

namespace {

void check(const TrainingMatrix& data, Mode mode) {
  if (data.features.rows() == 0) throw std::invalid_argument("fit: no training rows");
  if (mode != data.mode) throw std::invalid_argument("fit: training matrix built for the other mode");
  if (mode == Mode::regress_performance) {
    if (data.targets.size() != data.features.rows()) throw std::invalid_argument("fit: target count mismatch");
  } else {
    if (data.classes.size() != data.features.rows()) throw std::invalid_argument("fit: class count mismatch");
    for (int c : data.classes)
      if (c < 0 || static_cast<std::size_t>(c) >= data.designs.size())
        throw std::invalid_argument("fit: class index out of range");
  }
}

Booster fit_booster(const Matrix& x, std::span<const double> y, const Hyper& hyper, Rng& rng) {
  const std::size_t n = x.rows();
  Booster b;
  b.learning_rate = hyper.gbt_learning_rate;
  b.base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> pred(n, b.base), residual(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const TreeParams params{hyper.gbt_max_depth, 0};
  // every round fits all rows, so one sort serves them all
  const auto order = presort(x, all);
  b.trees.reserve(hyper.gbt_rounds);
  for (std::size_t r = 0; r < hyper.gbt_rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - pred[i];
    Tree t = build_regression_tree(x, residual, all, order, params, rng);
    for (std::size_t i = 0; i < n; ++i) pred[i] += b.learning_rate * t.predict(x.row(i));
    b.trees.push_back(std::move(t));
  }
  return b;
}

std::vector<std::size_t> bootstrap(std::size_t n, Rng& rng) {
  std::vector<std::size_t> s(n);
  for (auto& v : s) v = uniform_index(rng, n);
  return s;
}

}  // namespace

MetaLearnerModel fit(Kind kind, Mode mode, const TrainingMatrix& data, const Hyper& hyper, std::uint64_t seed) {
  check(data, mode);
  MetaLearnerModel model;
  model.kind = kind;
  model.mode = mode;
  model.hyper = hyper;
  model.width = data.features.cols();
  model.designs = data.designs;
  const std::size_t n = data.features.rows();

  switch (kind) {
    case Kind::knn:
      fit_knn(model, data);
      break;
    case Kind::rf: {
      const TreeParams params{hyper.rf_max_depth,
                              std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(model.width))))};
      model.forest.reserve(hyper.rf_trees);
      std::vector<std::size_t> rows(n);
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      const auto row_order = presort(data.features, rows);
      for (std::size_t t = 0; t < hyper.rf_trees; ++t) {
        Rng rng(derive_seed(seed, t));
        const auto sample = bootstrap(n, rng);
        const auto order = expand_presort(row_order, sample, n);
        if (mode == Mode::regress_performance)
          model.forest.push_back(build_regression_tree(data.features, data.targets, sample, order, params, rng));
        else
          model.forest.push_back(build_classification_tree(data.features, data.classes,
                                                           static_cast<int>(data.designs.size()), sample, order,
                                                           params, rng));
      }
      break;
    }
    case Kind::gbt: {
      Rng rng(seed);
      if (mode == Mode::regress_performance) {
        model.boosters.push_back(fit_booster(data.features, data.targets, hyper, rng));
      } else {
        // one-vs-rest on indicator targets
        std::vector<double> indicator(n);
        for (std::size_t c = 0; c < data.designs.size(); ++c) {
          for (std::size_t i = 0; i < n; ++i) indicator[i] = data.classes[i] == static_cast<int>(c) ? 1.0 : 0.0;
          model.boosters.push_back(fit_booster(data.features, indicator, hyper, rng));
        }
      }
      break;
    }
  }
  return model;
}

double MetaLearnerModel::predict_value(std::span<const double> x) const {
  if (x.size() != width) throw std::invalid_argument("predict: feature width mismatch");
  if (mode != Mode::regress_performance) throw std::logic_error("predict_value on a design-mode model");
  switch (kind) {
    case Kind::knn: return knn_value(*this, x);
    case Kind::rf: {
      double s = 0.0;
      for (const auto& t : forest) s += t.predict(x);
      return s / static_cast<double>(forest.size());
    }
    case Kind::gbt: return boosters.front().predict(x);
  }
  return 0.0;
}

int MetaLearnerModel::predict_class(std::span<const double> x) const {
  if (x.size() != width) throw std::invalid_argument("predict: feature width mismatch");
  if (mode != Mode::predict_design) throw std::logic_error("predict_class on a regression model");
  switch (kind) {
    case Kind::knn: return knn_class(*this, x);
    case Kind::rf: {
      std::vector<int> votes(designs.size(), 0);
      for (const auto& t : forest) ++votes[static_cast<std::size_t>(t.predict(x))];
      return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    case Kind::gbt: {
      int best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < boosters.size(); ++c) {
        const double s = boosters[c].predict(x);
        if (s > best_score) {
          best_score = s;
          best = static_cast<int>(c);
        }
      }
      return best;
    }
  }
  return 0;
}

double predict_performance(const MetaLearnerModel& model, const MetaFeatureVector& meta_features,
                           const Design& design, const GeneSchema& schema) {
  std::vector<double> x = meta_features.values;
  const auto enc = encode(schema, design);
  x.insert(x.end(), enc.begin(), enc.end());
  return std::clamp(model.predict_value(x), 0.0, 1.0);
}

Design predict_design(const MetaLearnerModel& model, const MetaFeatureVector& meta_features) {
  return model.designs.at(static_cast<std::size_t>(model.predict_class(meta_features.values)));
}

// ---------------------------------------------------------------- JSON

namespace {

nlohmann::json node_json(const Tree& t, std::size_t i) {
  const auto& n = t.nodes[i];
  if (n.feature < 0) return {{"value", n.value}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"value", n.value},
          {"left", node_json(t, static_cast<std::size_t>(n.left))},
          {"right", node_json(t, static_cast<std::size_t>(n.right))}};
}

int node_from_json(Tree& t, const nlohmann::json& j) {
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  t.nodes.back().value = j.at("value").get<double>();
  if (j.contains("feature")) {
    const int f = j.at("feature").get<int>();
    const double th = j.at("threshold").get<double>();
    const int l = node_from_json(t, j.at("left"));
    const int r = node_from_json(t, j.at("right"));
    auto& n = t.nodes[static_cast<std::size_t>(id)];
    n.feature = f;
    n.threshold = th;
    n.left = l;
    n.right = r;
  }
  return id;
}

nlohmann::json tree_json(const Tree& t) { return node_json(t, 0); }

Tree tree_from_json(const nlohmann::json& j) {
  Tree t;
  node_from_json(t, j);
  return t;
}

}  // namespace

nlohmann::json to_json(const MetaLearnerModel& m) {
  nlohmann::json j;
  j["kind"] = to_string(m.kind);
  j["mode"] = m.mode == Mode::regress_performance ? "regress_performance" : "predict_design";
  j["width"] = m.width;
  j["hyper"] = {{"knn_k", m.hyper.knn_k},
                {"rf_trees", m.hyper.rf_trees},
                {"rf_max_depth", m.hyper.rf_max_depth},
                {"gbt_rounds", m.hyper.gbt_rounds},
                {"gbt_learning_rate", m.hyper.gbt_learning_rate},
                {"gbt_max_depth", m.hyper.gbt_max_depth}};
  nlohmann::json designs = nlohmann::json::array();
  for (const auto& d : m.designs) designs.push_back(onmar::to_json(d));
  j["designs"] = designs;
  if (m.kind == Kind::knn) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows.rows(); ++i) {
      const auto r = m.rows.row(i);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["knn"] = {{"mean", m.mean}, {"scale", m.scale}, {"rows", rows}, {"targets", m.targets}, {"classes", m.classes}};
  }
  if (!m.forest.empty()) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : m.forest) trees.push_back(tree_json(t));
    j["forest"] = trees;
  }
  if (!m.boosters.empty()) {
    nlohmann::json bs = nlohmann::json::array();
    for (const auto& b : m.boosters) {
      nlohmann::json trees = nlohmann::json::array();
      for (const auto& t : b.trees) trees.push_back(tree_json(t));
      bs.push_back({{"base", b.base}, {"learning_rate", b.learning_rate}, {"trees", trees}});
    }
    j["boosters"] = bs;
  }
  return j;
}

MetaLearnerModel model_from_json(const nlohmann::json& j) {
  MetaLearnerModel m;
  m.kind = kind_from_string(j.at("kind").get<std::string>());
  m.mode = j.at("mode").get<std::string>() == "predict_design" ? Mode::predict_design : Mode::regress_performance;
  m.width = j.at("width").get<std::size_t>();
  const auto& h = j.at("hyper");
  m.hyper.knn_k = h.at("knn_k").get<std::size_t>();
  m.hyper.rf_trees = h.at("rf_trees").get<std::size_t>();
  m.hyper.rf_max_depth = h.at("rf_max_depth").get<int>();
  m.hyper.gbt_rounds = h.at("gbt_rounds").get<std::size_t>();
  m.hyper.gbt_learning_rate = h.at("gbt_learning_rate").get<double>();
  m.hyper.gbt_max_depth = h.at("gbt_max_depth").get<int>();
  for (const auto& d : j.at("designs")) m.designs.push_back(design_from_json(d));
  if (j.contains("knn")) {
    const auto& k = j.at("knn");
    m.mean = k.at("mean").get<std::vector<double>>();
    m.scale = k.at("scale").get<std::vector<double>>();
    m.rows = Matrix(0, m.width);
    for (const auto& r : k.at("rows")) m.rows.push_row(r.get<std::vector<double>>());
    m.targets = k.at("targets").get<std::vector<double>>();
    m.classes = k.at("classes").get<std::vector<int>>();
  }
  if (j.contains("forest"))
    for (const auto& t : j.at("forest")) m.forest.push_back(tree_from_json(t));
  if (j.contains("boosters"))
    for (const auto& b : j.at("boosters")) {
      Booster booster;
      booster.base = b.at("base").get<double>();
      booster.learning_rate = b.at("learning_rate").get<double>();
      for (const auto& t : b.at("trees")) booster.trees.push_back(tree_from_json(t));
      m.boosters.push_back(std::move(booster));
    }
  return m;
}

}  // namespace onmar::ml
