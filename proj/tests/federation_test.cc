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

#include "hashcomb/federation.h"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "hashcomb/rng.h"

namespace hashcomb {
namespace {

QuantizationScheme Range(double lo, double hi, int max_level = 16) {
  return QuantizationScheme::FromSourceRange(lo, hi, 0.0, max_level, 0.5, {});
}

TEST(ExactSumTest, CancellationAndOrderIndependence) {
  const double v[] = {1e100, 1.0, -1e100, 1e-30};
  EXPECT_EQ(SumExactly(v), 1.0 + 1e-30);
  const double w[] = {0.1, 0.2, 0.3};
  EXPECT_EQ(SumExactly(w), 0.6);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xs(1000);
  for (double& x : xs) x = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 8));
  const double ref = SumExactly(xs);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(xs.begin(), xs.end(), rng);
    EXPECT_EQ(SumExactly(xs), ref);
  }
  EXPECT_EQ(SumExactly(std::vector<double>{}), 0.0);
}

TEST(FedAvgTest, ElementwiseMean) {
  const std::vector<std::vector<double>> p = {{1.0, -2.0}, {3.0, 4.0}};
  EXPECT_EQ(FedAvg(p), (std::vector<double>{2.0, 1.0}));
  const std::vector<std::vector<double>> one = {{0.1, 0.2}};
  EXPECT_EQ(FedAvg(one), one[0]);
  const std::vector<std::vector<double>> ragged = {{1.0}, {1.0, 2.0}};
  EXPECT_THROW(FedAvg(ragged), std::invalid_argument);
  EXPECT_THROW(FedAvg(std::vector<std::vector<double>>{}),
               std::invalid_argument);
}

TEST(FedAvgHashedTest, MixedLevelsAverageMidpoints) {
  const QuantizationScheme s = Range(0.0, 1.0);
  const DigestTableSet tables = DigestTableSet::AllLevels(s);
  // 0.1 at level 1 decodes to 0.25, 0.3 at level 2 decodes to 0.375.
  const std::vector<std::vector<HashComb>> msgs = {{Encode(0.1, 1, s)},
                                                   {Encode(0.3, 2, s)}};
  EXPECT_EQ(FedAvgHashed(msgs, tables), (std::vector<double>{0.3125}));
}

TEST(FedAvgHashedTest, BitExactWithDecodeThenAverage) {
  const QuantizationScheme s = Range(-0.8, 0.6, 12);
  const DigestTableSet tables = DigestTableSet::AllLevels(s);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(s.c_min(), s.c_max());
  std::uniform_int_distribution<int> lv(1, 12);
  for (int nodes : {1, 3, 4, 7}) {
    std::vector<std::vector<HashComb>> msgs(nodes);
    std::vector<std::vector<double>> decoded(nodes);
    for (int n = 0; n < nodes; ++n) {
      for (int k = 0; k < 300; ++k) {
        // Few distinct values so groups of identical digests occur.
        const double x = k % 3 == 0 ? 0.01 : u(rng);
        msgs[n].push_back(Encode(x, lv(rng), s));
      }
      decoded[n] = DecodeAll(msgs[n], tables);
    }
    EXPECT_EQ(FedAvgHashed(msgs, tables), FedAvg(decoded)) << nodes;
  }
}

TEST(DpTest, SigmaSquaredFromFormula) {
  const DpParameters dp;
  EXPECT_NEAR(DpSensitivity(dp), 0.4, 1e-15);
  EXPECT_NEAR(DpSigmaSquared(dp), 0.18420680743952367, 1e-12);
  DpParameters twice = dp;
  twice.updates = 2.0;
  EXPECT_EQ(DpSigmaSquared(twice) / DpSigmaSquared(dp), 4.0);
}

TEST(DpTest, RejectsInvalidParameters) {
  DpParameters dp;
  dp.q = 0.0008;  // 1.25 q / delta = 1
  EXPECT_THROW(DpSigmaSquared(dp), std::invalid_argument);
  dp = {};
  dp.epsilon = 0.0;
  EXPECT_THROW(DpSigmaSquared(dp), std::invalid_argument);
  dp = {};
  dp.delta = 1.0;
  EXPECT_THROW(DpSigmaSquared(dp), std::invalid_argument);
}

TEST(DpTest, NoiseHasRequestedVariance) {
  std::mt19937_64 rng(12);
  std::vector<double> v(200000, 1.0);
  ApplyGaussianNoise(v, 0.18, rng);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= v.size() - 1;
  EXPECT_NEAR(mean, 1.0, 0.005);
  EXPECT_NEAR(var, 0.18, 0.18 * 0.02);
  std::vector<double> z(5, 2.0);
  ApplyGaussianNoise(z, 0.0, rng);
  EXPECT_EQ(z, std::vector<double>(5, 2.0));
  EXPECT_THROW(ApplyGaussianNoise(z, -1.0, rng), std::invalid_argument);
}

TEST(PartitionTest, SortedDistinctAndSized) {
  std::mt19937_64 rng(2);
  const auto parts = Partition(1000, 4, 0.25, rng);
  ASSERT_EQ(parts.size(), 4u);
  for (const auto& p : parts) {
    EXPECT_EQ(p.size(), 250u);
    EXPECT_TRUE(std::is_sorted(p.begin(), p.end()));
    EXPECT_EQ(std::set<std::size_t>(p.begin(), p.end()).size(), p.size());
    EXPECT_LT(p.back(), 1000u);
  }
  EXPECT_NE(parts[0], parts[1]);
  const auto all = Partition(10, 1, 1.0, rng);
  EXPECT_EQ(all[0].size(), 10u);
  EXPECT_THROW(Partition(10, 2, 0.0, rng), std::invalid_argument);
}

class RunFederationTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const Dataset all = MakeSyntheticDataset(600, 5, 0.05, 21);
    auto rng = DeriveRng(1, RngStream::kSplit);
    std::tie(train_, test_) = TrainTestSplit(all, 0.25, rng);
    config_.nodes = 3;
    config_.rounds = 4;
    config_.epochs_per_round = 300;
    config_.hidden_layers = {6};
    config_.learning_rate = 0.1;
  }
  Dataset train_;
  Dataset test_;
  FederationConfig config_;
};

TEST_F(RunFederationTest, SingleFullNodeEqualsCentralTraining) {
  FederationConfig c = config_;
  c.nodes = 1;
  c.rounds = 1;
  c.fraction = 1.0;
  const FederationResult fed = RunFederation(c, train_, test_, nullptr);
  Mlp model = InitialGlobalModel(c, static_cast<int>(train_.cols()));
  SgdOptions sgd;
  sgd.epochs = c.epochs_per_round;
  sgd.learning_rate = c.learning_rate;
  auto rng = DeriveRng(c.seed, RngStream::kNodeTraining, {0});
  TrainSgd(model, train_, sgd, rng);
  EXPECT_EQ(fed.final_parameters, model.Parameters());
}

TEST_F(RunFederationTest, ZeroNoiseDpEqualsPlainFedAvg) {
  const FederationResult plain = RunFederation(config_, train_, test_, nullptr);
  FederationConfig c = config_;
  c.mode = AggregationMode::kGaussianDp;
  c.dp.sigma2 = 0.0;
  c.dp.clip = 1e300;
  const FederationResult dp = RunFederation(c, train_, test_, nullptr);
  EXPECT_EQ(dp.final_parameters, plain.final_parameters);
  EXPECT_EQ(dp.dp_sigma2, 0.0);
}

TEST_F(RunFederationTest, FineHashCombTracksPlainFedAvg) {
  const FederationResult plain = RunFederation(config_, train_, test_, nullptr);
  FederationConfig c = config_;
  c.mode = AggregationMode::kHashComb;
  c.hc_fixed_level = 16;
  const QuantizationScheme s = Range(-4.0, 4.0);
  const FederationResult hc = RunFederation(c, train_, test_, &s);
  EXPECT_LE(std::fabs(hc.rounds.back().metrics.f1 -
                      plain.rounds.back().metrics.f1),
            0.01);
  EXPECT_GT(hc.rounds.back().payload_bytes,
            plain.rounds.back().payload_bytes);
}

TEST_F(RunFederationTest, SampledLevelsRun) {
  FederationConfig c = config_;
  c.mode = AggregationMode::kHashComb;
  const QuantizationScheme s = QuantizationScheme::FromSourceRange(
      -2.0, 2.0, 0.0, 16, SolveBias(8.0, 16), {});
  const FederationResult hc = RunFederation(c, train_, test_, &s);
  EXPECT_EQ(hc.rounds.size(), 4u);
  for (double v : hc.final_parameters) {
    EXPECT_GE(v, s.c_min());
    EXPECT_LE(v, s.c_max());
  }
}

TEST_F(RunFederationTest, ThreadCountDoesNotChangeResults) {
  FederationConfig a = config_;
  a.threads = 1;
  FederationConfig b = config_;
  b.threads = 4;
  EXPECT_EQ(RunFederation(a, train_, test_, nullptr).final_parameters,
            RunFederation(b, train_, test_, nullptr).final_parameters);
  a.mode = b.mode = AggregationMode::kGaussianDp;
  EXPECT_EQ(RunFederation(a, train_, test_, nullptr).final_parameters,
            RunFederation(b, train_, test_, nullptr).final_parameters);
}

TEST_F(RunFederationTest, CallbackSeesEveryRound) {
  std::vector<int> seen;
  const FederationResult r = RunFederation(
      config_, train_, test_, nullptr,
      [&](const RoundMetrics& m) { seen.push_back(m.round); });
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_GE(r.Best().metrics.f1, r.rounds.front().metrics.f1);
}

TEST_F(RunFederationTest, InvalidConfigurations) {
  FederationConfig c = config_;
  c.mode = AggregationMode::kHashComb;
  EXPECT_THROW(RunFederation(c, train_, test_, nullptr), std::invalid_argument);
  c = config_;
  c.nodes = 0;
  EXPECT_THROW(ValidateFederationConfig(c), std::invalid_argument);
  c = config_;
  c.fraction = 1.5;
  EXPECT_THROW(ValidateFederationConfig(c), std::invalid_argument);
  c = config_;
  c.learning_rate = 1e300;
  EXPECT_THROW(RunFederation(c, train_, test_, nullptr), TrainingDivergence);
}

}  // namespace
}  // namespace hashcomb
