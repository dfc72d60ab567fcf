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

#include "hashcomb/metrics.h"

#include <stdexcept>
#include <vector>

#include "hashcomb/dataset.h"
#include "hashcomb/mlp.h"

namespace hashcomb {

ClassificationMetrics MetricsFromConfusion(const ConfusionMatrix& cm) {
  ClassificationMetrics m;
  m.confusion = cm;
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  m.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
  return m;
}

ClassificationMetrics MetricsFromPredictions(std::span<const double> probs,
                                             std::span<const int> labels) {
  if (probs.size() != labels.size()) {
    throw std::invalid_argument("prediction and label counts differ");
  }
  if (probs.empty()) throw std::invalid_argument("no predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= 0.5;
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++cm.tp;
    else if (predicted) ++cm.fp;
    else if (actual) ++cm.fn;
    else ++cm.tn;
  }
  return MetricsFromConfusion(cm);
}

ClassificationMetrics Evaluate(const Mlp& model, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("empty evaluation set");
  std::vector<double> probs(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) probs[i] = model.Forward(data.Row(i));
  return MetricsFromPredictions(probs, data.labels());
}

}  // namespace hashcomb
