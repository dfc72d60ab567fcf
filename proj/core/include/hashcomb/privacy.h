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

#ifndef HASHCOMB_PRIVACY_H_
#define HASHCOMB_PRIVACY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hashcomb/quantization.h"

namespace hashcomb {

// Histogram of a sample over the 2^level channel midpoints of a scheme.
struct EmpiricalDistribution {
  int level = 0;
  std::size_t sample_size = 0;
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;  // counts / sample_size
  std::vector<double> midpoints;

  double PMax() const;
};

inline constexpr int kMaxHistogramLevel = 24;

// Throws std::out_of_range for a value outside [c_min, c_max] and
// std::invalid_argument for an empty sample or level outside
// [1, min(max_level, kMaxHistogramLevel)].
EmpiricalDistribution QuantizedDistribution(std::span<const double> sample,
                                            const QuantizationScheme& scheme,
                                            int level);

// D_alpha(P || Q) = ln(sum_h p_h^alpha q_h^(1 - alpha)) / (alpha - 1),
// evaluated in the log domain. Terms with p_h = 0 vanish; p_h > 0 with
// q_h = 0 gives +inf when alpha > 1. Throws std::invalid_argument for
// alpha <= 0, alpha == 1 or vectors of different length.
double RenyiDivergence(std::span<const double> p, std::span<const double> q,
                       double alpha);
double RenyiDivergence(const EmpiricalDistribution& p,
                       const EmpiricalDistribution& q, double alpha);

// max_h ln(p_h / q_h) over p_h > 0.
double MaxLogRatio(std::span<const double> p, std::span<const double> q);

// D_alpha between P and its adjacent Q, where one sample point moved from
// channel r to channel s, written with only the two changed terms spelled
// out. Agrees exactly with RenyiDivergence() on the materialized Q.
double AdjacentRenyiDivergence(const EmpiricalDistribution& p,
                               std::uint64_t r, std::uint64_t s, double alpha);

// ln(n) / (alpha - 1) + (2 alpha - 1) / (alpha - 1) * ln(p_max).
double DivergenceCap(double alpha, std::size_t n, double p_max);

// 2 ln(p_max), as stated; non-positive whenever p_max <= 1.
double EpsilonFromPMax(double p_max);

inline constexpr double kInfinityAlpha = 1024.0;

struct AlphaDivergence {
  double alpha = 0.0;
  double divergence = 0.0;
  double adjacent_form = 0.0;
  double cap = 0.0;
};

struct AdjacentDivergenceReport {
  int level = 0;
  std::size_t n = 0;
  double p_max = 0.0;
  std::uint64_t removed_channel = 0;
  std::uint64_t added_channel = 0;
  std::vector<AlphaDivergence> alphas;
  double d_inf_large_alpha = 0.0;  // at kInfinityAlpha
  double d_inf_max_ratio = 0.0;
  double epsilon = 0.0;      // 2 ln(p_max)
  double epsilon_abs = 0.0;  // |2 ln(p_max)|
};

// S' = S with sample[index] replaced by `replacement`; both quantized at
// `level`. Throws std::out_of_range for a bad index or out-of-range value.
AdjacentDivergenceReport AdjacentDivergence(std::span<const double> sample,
                                            std::size_t index,
                                            double replacement,
                                            const QuantizationScheme& scheme,
                                            int level,
                                            std::span<const double> alphas);

// One JSON object: level, n, p_max, epsilon, epsilon_abs, d_inf_* and an
// "alphas" array of {alpha, divergence, adjacent_form, cap}. Infinities
// are written as the string "inf".
std::string ReportToJson(const AdjacentDivergenceReport& report);

}  // namespace hashcomb

#endif  // HASHCOMB_PRIVACY_H_
