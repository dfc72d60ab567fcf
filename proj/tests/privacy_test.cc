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

#include "hashcomb/privacy.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"

namespace hashcomb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QuantizationScheme Unit() {
  return QuantizationScheme::FromSourceRange(-1.0, 1.0, 0.0, 16, 0.5, {});
}

std::vector<double> UniformSample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

TEST(RenyiTest, HandComputedValues) {
  const double p[] = {0.5, 0.5};
  const double q[] = {0.25, 0.75};
  // sum p^2 / q = 1 + 1/3.
  EXPECT_NEAR(RenyiDivergence(p, q, 2.0), std::log(4.0 / 3.0), 1e-15);
  // alpha = 1/2: -2 ln(sum sqrt(p q)).
  EXPECT_NEAR(RenyiDivergence(p, q, 0.5),
              -2.0 * std::log(std::sqrt(0.125) + std::sqrt(0.375)), 1e-15);
  EXPECT_NEAR(MaxLogRatio(p, q), std::log(2.0), 1e-15);
}

TEST(RenyiTest, IdenticalIsZeroAndSupportMismatchIsInfinite) {
  const double p[] = {0.2, 0.3, 0.5};
  EXPECT_EQ(RenyiDivergence(p, p, 3.0), 0.0);
  const double q[] = {0.0, 0.5, 0.5};
  EXPECT_EQ(RenyiDivergence(p, q, 2.0), kInf);
  EXPECT_EQ(MaxLogRatio(p, q), kInf);
  EXPECT_TRUE(std::isfinite(RenyiDivergence(p, q, 0.5)));
}

TEST(RenyiTest, RejectsBadAlphaAndShapes) {
  const double p[] = {0.5, 0.5};
  const double q[] = {1.0};
  EXPECT_THROW(RenyiDivergence(p, p, 1.0), std::invalid_argument);
  EXPECT_THROW(RenyiDivergence(p, p, 0.0), std::invalid_argument);
  EXPECT_THROW(RenyiDivergence(p, p, kInf), std::invalid_argument);
  EXPECT_THROW(RenyiDivergence(p, q, 2.0), std::invalid_argument);
}

TEST(RenyiTest, NonNegativeAndNondecreasingInAlpha) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(8);
    std::vector<double> q(8);
    double sp = 0.0;
    double sq = 0.0;
    for (int i = 0; i < 8; ++i) {
      sp += p[i] = u(rng);
      sq += q[i] = u(rng);
    }
    for (int i = 0; i < 8; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    double prev = 0.0;
    for (double alpha : {0.25, 0.5, 0.9, 1.1, 2.0, 4.0, 16.0, 64.0}) {
      const double d = RenyiDivergence(p, q, alpha);
      EXPECT_GE(d, -1e-12);
      EXPECT_GE(d, prev - 1e-12);
      prev = d;
    }
    EXPECT_LE(RenyiDivergence(p, q, kInfinityAlpha), MaxLogRatio(p, q) + 1e-12);
  }
}

TEST(HistogramTest, CountsAndMidpoints) {
  const double sample[] = {-1.0, -0.9, 0.1, 0.2, 1.0};
  const EmpiricalDistribution d = QuantizedDistribution(sample, Unit(), 2);
  EXPECT_EQ(d.counts, (std::vector<std::uint64_t>{2, 0, 2, 1}));
  EXPECT_EQ(d.midpoints, (std::vector<double>{-0.75, -0.25, 0.25, 0.75}));
  EXPECT_EQ(d.PMax(), 0.4);
  EXPECT_THROW(QuantizedDistribution(sample, Unit(), 0), std::invalid_argument);
  EXPECT_THROW(QuantizedDistribution(sample, Unit(), 17),
               std::invalid_argument);
  EXPECT_THROW(QuantizedDistribution({}, Unit(), 2), std::invalid_argument);
}

TEST(AdjacentTest, ClosedFormMatchesGenericExactly) {
  const auto sample = UniformSample(500, 5);
  const QuantizationScheme s = Unit();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> idx(0, sample.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t i = idx(rng);
    const double replacement = u(rng);
    const double alphas[] = {1.5, 2.0, 8.0};
    const AdjacentDivergenceReport r =
        AdjacentDivergence(sample, i, replacement, s, 6, alphas);
    for (const AlphaDivergence& a : r.alphas) {
      EXPECT_EQ(a.adjacent_form, a.divergence);
      EXPECT_GE(a.divergence, 0.0);
    }
  }
}

TEST(AdjacentTest, SameChannelGivesZero) {
  const auto sample = UniformSample(100, 1);
  const double alphas[] = {2.0};
  const AdjacentDivergenceReport r =
      AdjacentDivergence(sample, 0, sample[0], Unit(), 8, alphas);
  EXPECT_EQ(r.removed_channel, r.added_channel);
  EXPECT_EQ(r.alphas[0].divergence, 0.0);
  EXPECT_EQ(r.alphas[0].adjacent_form, 0.0);
  EXPECT_EQ(r.d_inf_max_ratio, 0.0);
}

TEST(AdjacentTest, MovingIntoEmptyChannelStaysFinite) {
  // Q gains mass where P has none; D(P || Q) only sees the removed channel.
  std::vector<double> sample(10, -0.5);
  const double alphas[] = {2.0};
  const AdjacentDivergenceReport r =
      AdjacentDivergence(sample, 3, 0.5, Unit(), 1, alphas);
  EXPECT_EQ(r.p_max, 1.0);
  EXPECT_EQ(r.epsilon, 0.0);
  // P = (1, 0), Q = (0.9, 0.1): D_2 = ln(1 / 0.9).
  EXPECT_NEAR(r.alphas[0].divergence, std::log(1.0 / 0.9), 1e-15);
  EXPECT_NEAR(r.d_inf_max_ratio, std::log(1.0 / 0.9), 1e-15);
}

TEST(CapTest, FormulaAndEpsilon) {
  EXPECT_NEAR(DivergenceCap(2.0, 100, 0.1),
              std::log(100.0) + 3.0 * std::log(0.1), 1e-12);
  EXPECT_NEAR(EpsilonFromPMax(0.25), 2.0 * std::log(0.25), 1e-15);
  EXPECT_THROW(DivergenceCap(2.0, 0, 0.1), std::invalid_argument);
  EXPECT_THROW(DivergenceCap(2.0, 10, 0.0), std::invalid_argument);
  EXPECT_THROW(EpsilonFromPMax(0.0), std::invalid_argument);
}

TEST(ReportTest, JsonHasBothEpsilonsAndEncodesInfinity) {
  std::vector<double> sample(10, -0.5);
  sample[0] = 0.5;
  const double alphas[] = {2.0};
  // Moving the only point out of channel 1 leaves Q with no mass there.
  const AdjacentDivergenceReport r =
      AdjacentDivergence(sample, 0, -0.5, Unit(), 1, alphas);
  EXPECT_EQ(r.alphas[0].divergence, kInf);
  const auto j = nlohmann::json::parse(ReportToJson(r));
  EXPECT_EQ(j["alphas"][0]["divergence"], "inf");
  EXPECT_NEAR(j["epsilon"].get<double>(), 2.0 * std::log(0.9), 1e-15);
  EXPECT_NEAR(j["epsilon_abs"].get<double>(), -2.0 * std::log(0.9), 1e-15);
  EXPECT_EQ(j["level"], 1);
  EXPECT_EQ(j["n"], 10);
}

}  // namespace
}  // namespace hashcomb
