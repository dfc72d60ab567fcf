// Copyright 2026 The Hash-Comb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hashcomb/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hashcomb {
namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> SplitLine(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(delimiter, start);
    cells.push_back(Trim(std::string_view(line).substr(
        start, end == std::string::npos ? std::string::npos : end - start)));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return cells;
}

double ParseNumber(const std::string& cell, std::size_t line_no) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DatasetError("line " + std::to_string(line_no) +
                       ": non-numeric cell '" + cell + "'");
  }
  return value;
}

}  // namespace

Dataset::Dataset(std::vector<double> features, std::vector<int> labels,
                 std::size_t cols, std::vector<std::string> feature_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      cols_(cols),
      feature_names_(std::move(feature_names)) {
  if (cols_ == 0 || features_.size() != labels_.size() * cols_) {
    throw DatasetError("feature matrix does not match rows x cols");
  }
  if (!feature_names_.empty() && feature_names_.size() != cols_) {
    throw DatasetError("feature name count does not match cols");
  }
  for (int label : labels_) {
    if (label != 0 && label != 1) throw DatasetError("labels must be 0 or 1");
  }
}

std::size_t Dataset::CountPositive() const {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), 1));
}

void Dataset::MinMaxNormalize() {
  column_min_.assign(cols_, 0.0);
  column_max_.assign(cols_, 0.0);
  if (empty()) return;
  for (std::size_t c = 0; c < cols_; ++c) {
    double lo = features_[c];
    double hi = features_[c];
    for (std::size_t r = 1; r < rows(); ++r) {
      lo = std::min(lo, features_[r * cols_ + c]);
      hi = std::max(hi, features_[r * cols_ + c]);
    }
    column_min_[c] = lo;
    column_max_[c] = hi;
    const double width = hi - lo;
    for (std::size_t r = 0; r < rows(); ++r) {
      double& v = features_[r * cols_ + c];
      v = width > 0.0 ? (v - lo) / width : 0.0;
    }
  }
}

Dataset Dataset::Subset(std::span<const std::size_t> rows_to_keep) const {
  std::vector<double> features;
  std::vector<int> labels;
  features.reserve(rows_to_keep.size() * cols_);
  labels.reserve(rows_to_keep.size());
  for (std::size_t r : rows_to_keep) {
    if (r >= rows()) throw std::out_of_range("subset row out of range");
    const auto row = Row(r);
    features.insert(features.end(), row.begin(), row.end());
    labels.push_back(labels_[r]);
  }
  Dataset out(std::move(features), std::move(labels), cols_, feature_names_);
  out.column_min_ = column_min_;
  out.column_max_ = column_max_;
  return out;
}

Dataset ParseCsv(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    header = SplitLine(line, options.delimiter);
  }
  if (header.size() < 2) {
    throw DatasetError("CSV needs a header with at least two columns");
  }
  std::size_t label_col = header.size() - 1;
  if (!options.label_column.empty()) {
    const auto it =
        std::find(header.begin(), header.end(), options.label_column);
    if (it == header.end()) {
      throw DatasetError("label column '" + options.label_column +
                         "' not found");
    }
    label_col = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) names.push_back(header[c]);
  }

  std::vector<double> features;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto cells = SplitLine(line, options.delimiter);
    if (cells.size() != header.size()) {
      throw DatasetError("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " cells, got " +
                         std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_col) continue;
      features.push_back(ParseNumber(cells[c], line_no));
    }
    const std::string& cell = cells[label_col];
    if (options.positive_label) {
      labels.push_back(cell == *options.positive_label ? 1 : 0);
    } else {
      const double v = ParseNumber(cell, line_no);
      if (v != 0.0 && v != 1.0) {
        throw DatasetError("line " + std::to_string(line_no) +
                           ": label must be 0 or 1, got '" + cell + "'");
      }
      labels.push_back(static_cast<int>(v));
    }
  }
  if (labels.empty()) throw DatasetError("CSV has no data rows");
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    throw DatasetError("CSV contains a single class");
  }
  const std::size_t cols = names.size();
  Dataset data(std::move(features), std::move(labels), cols, std::move(names));
  data.MinMaxNormalize();
  return data;
}

Dataset IngestCsv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path);
  return ParseCsv(in, options);
}

std::pair<Dataset, Dataset> TrainTestSplit(const Dataset& data,
                                           double test_fraction,
                                           std::mt19937_64& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DatasetError("test fraction must be in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(data.rows())));
  if (n_test == 0 || n_test >= data.rows()) {
    throw DatasetError("split leaves an empty side");
  }
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Fisher-Yates with an explicit draw so the order does not depend on the
  // standard library's shuffle.
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  const std::size_t n_train = data.rows() - n_test;
  std::vector<std::size_t> train(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> test(order.begin() + n_train, order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {data.Subset(train), data.Subset(test)};
}

Dataset MakeSyntheticDataset(std::size_t rows, std::size_t features,
                             double label_noise, std::uint64_t seed) {
  if (rows < 2 || features == 0) {
    throw DatasetError("synthetic data needs >= 2 rows and >= 1 feature");
  }
  if (!(label_noise >= 0.0 && label_noise < 0.5)) {
    throw DatasetError("label noise must be in [0, 0.5)");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> direction(features);
  double norm = 0.0;
  for (double& d : direction) {
    d = gauss(rng);
    norm += d * d;
  }
  norm = std::sqrt(norm);
  for (double& d : direction) d /= norm;

  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution flip(label_noise);
  std::normal_distribution<double> spread(0.0, 0.15);
  std::vector<double> x;
  std::vector<int> y;
  x.reserve(rows * features);
  for (std::size_t r = 0; r < rows; ++r) {
    // Guarantee both classes are present.
    const int label = r < 2 ? static_cast<int>(r) : (coin(rng) ? 1 : 0);
    const double offset = label == 1 ? 0.15 : -0.15;
    for (std::size_t c = 0; c < features; ++c) {
      const double v = 0.5 + offset * direction[c] + spread(rng);
      x.push_back(std::clamp(v, 0.0, 1.0));
    }
    y.push_back(r >= 2 && flip(rng) ? 1 - label : label);
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < features; ++c) {
    names.push_back("f" + std::to_string(c));
  }
  return Dataset(std::move(x), std::move(y), features, std::move(names));
}

void WriteCsv(const Dataset& data, std::ostream& out) {
  for (std::size_t c = 0; c < data.cols(); ++c) {
    out << (data.feature_names().empty() ? "f" + std::to_string(c)
                                         : data.feature_names()[c])
        << ',';
  }
  out << "label\n";
  out << std::setprecision(17);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (double v : data.Row(r)) out << v << ',';
    out << data.Label(r) << '\n';
  }
}

}  // namespace hashcomb
