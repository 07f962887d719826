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

#include "onmar/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace onmar {

int LabeledDataset::classes() const {
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  return top + 1;
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(classes()), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

void validate(const LabeledDataset& data) {
  if (data.labels.size() < 2) throw std::invalid_argument("dataset needs at least two instances");
  if (data.features.rows() != data.labels.size()) throw std::invalid_argument("feature/label count mismatch");
  if (data.features.cols() == 0) throw std::invalid_argument("dataset has no features");
  for (int l : data.labels)
    if (l < 0) throw std::invalid_argument("negative class label");
}

LabeledDataset subset(const LabeledDataset& data, const std::vector<std::size_t>& rows) {
  LabeledDataset out;
  out.name = data.name;
  out.features = Matrix(0, data.dims());
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    out.features.push_row(data.features.row(r));
    out.labels.push_back(data.labels[r]);
  }
  return out;
}

LabeledDataset generate_blobs(std::size_t n, int k_true, std::size_t d, double separation, Rng& rng) {
  if (k_true < 1 || n < static_cast<std::size_t>(k_true)) throw std::invalid_argument("generate_blobs: need n >= k >= 1");
  if (d == 0) throw std::invalid_argument("generate_blobs: d must be positive");
  const auto k = static_cast<std::size_t>(k_true);

  // rejection-sample centres in a box that comfortably fits k separated balls
  const double half = std::max(1.0, separation) * std::pow(static_cast<double>(k), 1.0 / static_cast<double>(d));
  Matrix centres(0, d);
  std::vector<double> c(d);
  bool placed_all = true;
  for (std::size_t placed = 0; placed < k && placed_all; ++placed) {
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      for (auto& v : c) v = uniform_real(rng, -half, half);
      ok = true;
      for (std::size_t j = 0; j < centres.rows() && ok; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < d; ++t) s += (c[t] - centres(j, t)) * (c[t] - centres(j, t));
        ok = std::sqrt(s) >= separation;
      }
    }
    if (ok) centres.push_row(c);
    placed_all = ok;
  }
  if (!placed_all) {
    // a line of centres always satisfies the separation constraint
    centres = Matrix(k, d);
    for (std::size_t j = 0; j < k; ++j) centres(j, 0) = static_cast<double>(j) * separation;
  }

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % k);
  shuffle(labels, rng);

  LabeledDataset out;
  out.name = "blobs";
  out.features = Matrix(n, d);
  out.labels = labels;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < d; ++t)
      out.features(i, t) = centres(static_cast<std::size_t>(labels[i]), t) + standard_normal(rng);
  return out;
}

std::pair<LabeledDataset, LabeledDataset> stratified_two_folds(const LabeledDataset& data, Rng& rng) {
  validate(data);
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(data.classes()));
  for (std::size_t i = 0; i < data.size(); ++i) by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);
  std::vector<std::size_t> first, second;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 2)
      throw std::invalid_argument("class " + std::to_string(c) + " has a single instance; cannot stratify");
    shuffle(members, rng);
    const std::size_t take = (members.size() + 1) / 2;
    first.insert(first.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    second.insert(second.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  auto f1 = subset(data, first);
  auto f2 = subset(data, second);
  f1.name = data.name + "/fold1";
  f2.name = data.name + "/fold2";
  return {std::move(f1), std::move(f2)};
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  LabeledDataset out;
  out.name = path.stem().string();
  std::map<std::string, int> label_ids;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_pending = has_header;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() < 2) throw ParseError("expected at least one feature and a label", line_no);
    if (width == 0) {
      width = fields.size();
      out.features = Matrix(0, width - 1);
    } else if (fields.size() != width) {
      throw ParseError("ragged row: expected " + std::to_string(width) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    row.clear();
    for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
      const std::string f = trim(fields[i]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v))
        throw ParseError("non-numeric feature '" + f + "' in column " + std::to_string(i + 1), line_no);
      row.push_back(v);
    }
    out.features.push_row(row);
    const std::string label = trim(fields.back());
    const auto [it, inserted] = label_ids.emplace(label, static_cast<int>(label_ids.size()));
    out.labels.push_back(it->second);
  }
  if (out.labels.empty()) throw ParseError("no data rows in " + path.string(), line_no);
  return out;
}

}  // namespace onmar
