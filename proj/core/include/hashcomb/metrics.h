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

#ifndef HASHCOMB_METRICS_H_
#define HASHCOMB_METRICS_H_

#include <cstddef>
#include <span>

namespace hashcomb {

class Dataset;
class Mlp;

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionMatrix confusion;
};

// F1 = 2TP / (2TP + FP + FN); undefined ratios read as 0.
ClassificationMetrics MetricsFromConfusion(const ConfusionMatrix& cm);

// A prediction is positive when its probability is >= 0.5.
ClassificationMetrics MetricsFromPredictions(std::span<const double> probs,
                                             std::span<const int> labels);

// Throws std::invalid_argument on an empty dataset.
ClassificationMetrics Evaluate(const Mlp& model, const Dataset& data);

}  // namespace hashcomb

#endif  // HASHCOMB_METRICS_H_
