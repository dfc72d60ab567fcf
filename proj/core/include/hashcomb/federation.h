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

#ifndef HASHCOMB_FEDERATION_H_
#define HASHCOMB_FEDERATION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hashcomb/codec.h"
#include "hashcomb/dataset.h"
#include "hashcomb/metrics.h"
#include "hashcomb/mlp.h"
#include "hashcomb/quantization.h"

namespace hashcomb {

// Correctly rounded floating-point sum (Shewchuk partials): the result is
// the exact real sum rounded once, so it does not depend on input order.
class ExactSum {
 public:
  void Add(double x);
  double Result() const;

 private:
  std::vector<double> partials_;
};

double SumExactly(std::span<const double> values);

enum class AggregationMode { kNoHc, kHashComb, kGaussianDp };

std::string_view AggregationModeName(AggregationMode mode);

// Each node gets round(fraction * train_rows) distinct row indices, drawn
// independently of the other nodes and returned sorted. Throws
// std::invalid_argument when that size is 0 or exceeds train_rows.
std::vector<std::vector<std::size_t>> Partition(std::size_t train_rows,
                                                int nodes, double fraction,
                                                std::mt19937_64& rng);

// Element-wise mean. Throws std::invalid_argument on no vectors or a length
// mismatch.
std::vector<double> FedAvg(std::span<const std::vector<double>> node_params);

// Per parameter: groups the N final digests, counts multiplicity c_i of
// each distinct digest h_i and returns sum_i c_i * midpoint(h_i) / N.
// Throws UnknownDigestError when a digest is not in `tables`.
std::vector<double> FedAvgHashed(std::span<const std::vector<HashComb>> messages,
                                 const DigestTableSet& tables);

std::vector<double> DecodeAll(std::span<const HashComb> combs,
                              const DigestTableSet& tables);

struct DpParameters {
  double epsilon = 2.0;
  double delta = 1e-3;
  double q = 0.008;            // Q / rows
  double updates = 1.0;        // Q, SGD updates per round
  double clip = 2.0;           // G
  double learning_rate = 0.05; // eta
};

// 4 * Q * G * eta.
double DpSensitivity(const DpParameters& dp);
// 2 (4 Q G eta)^2 ln(1.25 q / delta) / epsilon^2. Throws
// std::invalid_argument unless epsilon > 0, 0 < delta < 1 and
// 1.25 q / delta > 1.
double DpSigmaSquared(const DpParameters& dp);

// Adds i.i.d. N(0, sigma2) to every element. sigma2 == 0 leaves the vector
// untouched and draws nothing.
void ApplyGaussianNoise(std::span<double> values, double sigma2,
                        std::mt19937_64& rng);

struct RoundMessage {
  int node = 0;
  int round = 0;
  AggregationMode mode = AggregationMode::kNoHc;
  // Clear or noisy parameters (kNoHc, kGaussianDp).
  std::vector<double> parameters;
  // Serialized Hash-Comb records (kHashComb).
  std::vector<std::uint8_t> records;

  std::size_t payload_bytes() const {
    return parameters.size() * sizeof(double) + records.size();
  }
};

struct DpConfig {
  double epsilon = 2.0;
  double delta = 1e-3;
  double clip = 2.0;
  // Defaults: Q = epochs per round, q = Q / node rows.
  std::optional<double> updates;
  std::optional<double> q;
  // Bypasses the formula.
  std::optional<double> sigma2;
};

struct FederationConfig {
  int nodes = 4;
  int rounds = 40;
  long epochs_per_round = 1000;
  double learning_rate = 0.05;
  double fraction = 0.25;
  // false keeps the round-1 partition for every round.
  bool resample_each_round = true;
  AggregationMode mode = AggregationMode::kNoHc;
  // kHashComb: one level for every parameter, or per-parameter biased-coin
  // sampling when empty.
  std::optional<int> hc_fixed_level;
  DpConfig dp;
  std::vector<int> hidden_layers = DefaultHiddenLayers();
  std::uint64_t seed = 1;
  // 0 = one worker per node.
  int threads = 0;
};

// Throws std::invalid_argument describing the first invalid field.
void ValidateFederationConfig(const FederationConfig& config);

struct RoundMetrics {
  int round = 0;
  ClassificationMetrics metrics;
  double wall_ms = 0.0;
  std::size_t payload_bytes = 0;  // summed over nodes
};

struct FederationResult {
  std::vector<RoundMetrics> rounds;
  std::vector<double> final_parameters;
  // Node message sigma^2 in DP mode, 0 otherwise.
  double dp_sigma2 = 0.0;

  const RoundMetrics& Best() const;
};

// The shared starting model every node receives in round 1.
Mlp InitialGlobalModel(const FederationConfig& config, int input_dim);

// Runs config.rounds rounds: partition, local training from the global
// parameters, per-mode encoding, aggregation, evaluation on `test`.
// `scheme` is required for kHashComb; parameters outside [c_min, c_max]
// are clamped before encoding. Propagates TrainingDivergence.
FederationResult RunFederation(
    const FederationConfig& config, const Dataset& train, const Dataset& test,
    const QuantizationScheme* scheme,
    const std::function<void(const RoundMetrics&)>& on_round = {});

}  // namespace hashcomb

#endif  // HASHCOMB_FEDERATION_H_
