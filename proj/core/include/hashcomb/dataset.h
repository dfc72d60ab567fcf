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

#ifndef HASHCOMB_DATASET_H_
#define HASHCOMB_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hashcomb {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary-labelled feature matrix.
class Dataset {
 public:
  Dataset() = default;
  // Throws DatasetError unless features.size() == labels.size() * cols.
  Dataset(std::vector<double> features, std::vector<int> labels,
          std::size_t cols, std::vector<std::string> feature_names = {});

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return cols_; }
  bool empty() const { return labels_.empty(); }

  std::span<const double> Row(std::size_t i) const {
    return {features_.data() + i * cols_, cols_};
  }
  int Label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<double>& features() const { return features_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  std::size_t CountPositive() const;

  // Raw per-column bounds recorded by MinMaxNormalize().
  const std::vector<double>& column_min() const { return column_min_; }
  const std::vector<double>& column_max() const { return column_max_; }

  // Rescales every column to [0, 1]; constant columns become 0.
  void MinMaxNormalize();

  Dataset Subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<double> features_;
  std::vector<int> labels_;
  std::size_t cols_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<double> column_min_;
  std::vector<double> column_max_;
};

struct CsvOptions {
  // Header name of the label column; the last column when empty.
  std::string label_column;
  // When set, rows whose label cell equals this token are positive and all
  // others negative. Otherwise label cells must read 0 or 1.
  std::optional<std::string> positive_label;
  char delimiter = ',';
};

// Parses a CSV with a header row and min-max normalizes the features.
// Throws DatasetError for missing/non-numeric cells, an unknown label
// column, ragged rows, or single-class data.
Dataset ParseCsv(std::istream& in, const CsvOptions& options = {});
Dataset IngestCsv(const std::string& path, const CsvOptions& options = {});

// Seeded shuffle then split; the second dataset gets round(test_fraction *
// rows) rows. Throws DatasetError if either side would be empty.
std::pair<Dataset, Dataset> TrainTestSplit(const Dataset& data,
                                           double test_fraction,
                                           std::mt19937_64& rng);

// Two Gaussian blobs in [0,1]^features separated along a random direction;
// `label_noise` flips that fraction of labels. Already normalized.
Dataset MakeSyntheticDataset(std::size_t rows, std::size_t features,
                             double label_noise, std::uint64_t seed);

// Writes `data` as CSV with a header; the label column is named "label".
void WriteCsv(const Dataset& data, std::ostream& out);

}  // namespace hashcomb

#endif  // HASHCOMB_DATASET_H_
