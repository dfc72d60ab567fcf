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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "hashcomb/rng.h"

namespace hashcomb {

void ExactSum::Add(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite summand");
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

double ExactSum::Result() const {
  std::size_t n = partials_.size();
  if (n == 0) return 0.0;
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  // Round-half-even correction when the remainder sits exactly on a tie.
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

double SumExactly(std::span<const double> values) {
  ExactSum sum;
  for (double v : values) sum.Add(v);
  return sum.Result();
}

std::string_view AggregationModeName(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::kNoHc:
      return "nohc";
    case AggregationMode::kHashComb:
      return "hc";
    case AggregationMode::kGaussianDp:
      return "dp";
  }
  return "unknown";
}

std::vector<std::vector<std::size_t>> Partition(std::size_t train_rows,
                                                int nodes, double fraction,
                                                std::mt19937_64& rng) {
  if (nodes < 1) throw std::invalid_argument("need at least one node");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("fraction must be in (0, 1]");
  }
  const auto m = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(train_rows)));
  if (m == 0 || m > train_rows) {
    throw std::invalid_argument("partition would be empty");
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> pool(train_rows);
  for (int node = 0; node < nodes; ++node) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    if (m < train_rows) {
      for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, train_rows - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
    }
    std::vector<std::size_t> rows(pool.begin(), pool.begin() + m);
    std::sort(rows.begin(), rows.end());
    out.push_back(std::move(rows));
  }
  return out;
}

std::vector<double> FedAvg(std::span<const std::vector<double>> node_params) {
  if (node_params.empty()) throw std::invalid_argument("no node parameters");
  const std::size_t dim = node_params.front().size();
  for (const auto& v : node_params) {
    if (v.size() != dim) throw std::invalid_argument("parameter length mismatch");
  }
  const double n = static_cast<double>(node_params.size());
  std::vector<double> out(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    ExactSum sum;
    for (const auto& v : node_params) sum.Add(v[j]);
    out[j] = sum.Result() / n;
  }
  return out;
}

std::vector<double> DecodeAll(std::span<const HashComb> combs,
                              const DigestTableSet& tables) {
  std::vector<double> out;
  out.reserve(combs.size());
  for (const HashComb& comb : combs) out.push_back(Decode(comb, tables));
  return out;
}

std::vector<double> FedAvgHashed(std::span<const std::vector<HashComb>> messages,
                                 const DigestTableSet& tables) {
  if (messages.empty()) throw std::invalid_argument("no node messages");
  const std::size_t dim = messages.front().size();
  for (const auto& m : messages) {
    if (m.size() != dim) throw std::invalid_argument("record count mismatch");
  }
  const double n = static_cast<double>(messages.size());
  std::vector<double> out(dim);
  struct Group {
    const HashComb* comb;
    std::uint64_t count;
  };
  std::vector<Group> groups;
  for (std::size_t j = 0; j < dim; ++j) {
    groups.clear();
    for (const auto& m : messages) {
      const HashComb& comb = m[j];
      if (comb.level < 1 || comb.chain.size() != static_cast<std::size_t>(comb.level)) {
        throw std::invalid_argument("malformed Hash-Comb record");
      }
      auto it = std::find_if(groups.begin(), groups.end(), [&comb](const Group& g) {
        return g.comb->chain.back() == comb.chain.back();
      });
      if (it == groups.end()) {
        groups.push_back({&comb, 1});
      } else {
        ++it->count;
      }
    }
    ExactSum sum;
    for (const Group& g : groups) {
      const double midpoint = Decode(*g.comb, tables);
      // c * m split into two doubles whose sum is exact.
      const double c = static_cast<double>(g.count);
      const double prod = c * midpoint;
      const double err = std::fma(c, midpoint, -prod);
      sum.Add(prod);
      if (err != 0.0) sum.Add(err);
    }
    out[j] = sum.Result() / n;
  }
  return out;
}

double DpSensitivity(const DpParameters& dp) {
  return 4.0 * dp.updates * dp.clip * dp.learning_rate;
}

double DpSigmaSquared(const DpParameters& dp) {
  if (!(dp.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(dp.delta > 0.0 && dp.delta < 1.0)) {
    throw std::invalid_argument("delta must be in (0, 1)");
  }
  if (!(dp.q > 0.0) || !(1.25 * dp.q / dp.delta > 1.0)) {
    throw std::invalid_argument("1.25 q / delta must exceed 1");
  }
  if (!(dp.updates > 0.0 && dp.clip > 0.0 && dp.learning_rate > 0.0)) {
    throw std::invalid_argument("Q, G and eta must be positive");
  }
  const double sensitivity = DpSensitivity(dp);
  return 2.0 * sensitivity * sensitivity * std::log(1.25 * dp.q / dp.delta) /
         (dp.epsilon * dp.epsilon);
}

void ApplyGaussianNoise(std::span<double> values, double sigma2,
                        std::mt19937_64& rng) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("sigma^2 must be finite and >= 0");
  }
  if (sigma2 == 0.0) return;
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
  for (double& v : values) v += noise(rng);
}

void ValidateFederationConfig(const FederationConfig& config) {
  if (config.nodes < 1) throw std::invalid_argument("nodes must be >= 1");
  if (config.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (config.epochs_per_round < 1) {
    throw std::invalid_argument("epochs per round must be >= 1");
  }
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be > 0");
  }
  if (!(config.fraction > 0.0 && config.fraction <= 1.0)) {
    throw std::invalid_argument("fraction must be in (0, 1]");
  }
  if (config.hc_fixed_level && *config.hc_fixed_level < 1) {
    throw std::invalid_argument("fixed level must be >= 1");
  }
  if (config.mode == AggregationMode::kGaussianDp) {
    const DpConfig& dp = config.dp;
    if (!(dp.clip > 0.0)) throw std::invalid_argument("clip G must be > 0");
    if (dp.sigma2 && !(*dp.sigma2 >= 0.0)) {
      throw std::invalid_argument("sigma^2 must be >= 0");
    }
  }
}

const RoundMetrics& FederationResult::Best() const {
  if (rounds.empty()) throw std::logic_error("no rounds recorded");
  // Earliest round wins ties.
  return *std::max_element(rounds.begin(), rounds.end(),
                           [](const RoundMetrics& a, const RoundMetrics& b) {
                             return a.metrics.f1 < b.metrics.f1;
                           });
}

Mlp InitialGlobalModel(const FederationConfig& config, int input_dim) {
  auto rng = DeriveRng(config.seed, RngStream::kModelInit);
  const auto sizes = LayerSizes(input_dim, config.hidden_layers);
  return Mlp::Create(sizes, rng);
}

namespace {

struct NodeState {
  std::mt19937_64 train_rng;
  std::mt19937_64 level_rng;
  std::mt19937_64 noise_rng;
};

std::vector<int> LevelsNeeded(const FederationConfig& config,
                              const QuantizationScheme& scheme) {
  const int top = config.hc_fixed_level.value_or(scheme.max_level());
  if (top > scheme.max_level()) {
    throw std::invalid_argument("fixed level exceeds the scheme's L");
  }
  std::vector<int> levels(top);
  std::iota(levels.begin(), levels.end(), 1);
  return levels;
}

double NodeSigma2(const FederationConfig& config, std::size_t node_rows) {
  const DpConfig& dp = config.dp;
  if (dp.sigma2) return *dp.sigma2;
  DpParameters p;
  p.epsilon = dp.epsilon;
  p.delta = dp.delta;
  p.clip = dp.clip;
  p.learning_rate = config.learning_rate;
  p.updates = dp.updates.value_or(static_cast<double>(config.epochs_per_round));
  p.q = dp.q.value_or(p.updates / static_cast<double>(node_rows));
  return DpSigmaSquared(p);
}

template <typename Fn>
void RunNodes(int nodes, int threads, Fn&& fn) {
  const int workers = std::clamp(threads <= 0 ? nodes : threads, 1, nodes);
  if (workers == 1) {
    for (int node = 0; node < nodes; ++node) fn(node);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(nodes);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int node = next++; node < nodes; node = next++) {
        try {
          fn(node);
        } catch (...) {
          errors[node] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

FederationResult RunFederation(
    const FederationConfig& config, const Dataset& train, const Dataset& test,
    const QuantizationScheme* scheme,
    const std::function<void(const RoundMetrics&)>& on_round) {
  ValidateFederationConfig(config);
  if (train.empty() || test.empty()) {
    throw std::invalid_argument("train and test splits must be non-empty");
  }
  if (config.mode == AggregationMode::kHashComb && scheme == nullptr) {
    throw std::invalid_argument("Hash-Comb mode needs a negotiated scheme");
  }

  Mlp global = InitialGlobalModel(config, static_cast<int>(train.cols()));
  const std::size_t dim = global.ParameterCount();

  std::optional<DigestTableSet> tables;
  if (config.mode == AggregationMode::kHashComb) {
    tables.emplace(*scheme, LevelsNeeded(config, *scheme));
  }

  std::vector<NodeState> states;
  for (int node = 0; node < config.nodes; ++node) {
    const auto tag = static_cast<std::uint64_t>(node);
    states.push_back({DeriveRng(config.seed, RngStream::kNodeTraining, {tag}),
                      DeriveRng(config.seed, RngStream::kLevelSampling, {tag}),
                      DeriveRng(config.seed, RngStream::kDpNoise, {tag})});
  }
  auto partition_rng = DeriveRng(config.seed, RngStream::kPartition);

  SgdOptions sgd;
  sgd.epochs = config.epochs_per_round;
  sgd.learning_rate = config.learning_rate;
  if (config.mode == AggregationMode::kGaussianDp) sgd.clip = config.dp.clip;

  FederationResult result;
  std::vector<std::vector<std::size_t>> parts;
  for (int round = 1; round <= config.rounds; ++round) {
    const auto start = std::chrono::steady_clock::now();
    if (round == 1 || config.resample_each_round) {
      parts = Partition(train.rows(), config.nodes, config.fraction,
                        partition_rng);
    }
    const std::vector<double> global_params = global.Parameters();
    std::vector<RoundMessage> messages(config.nodes);
    std::vector<double> sigma2(config.nodes, 0.0);

    RunNodes(config.nodes, config.threads, [&](int node) {
      NodeState& state = states[node];
      Mlp local = global;
      TrainSgd(local, train, parts[node], sgd, state.train_rng);
      RoundMessage& msg = messages[node];
      msg.node = node;
      msg.round = round;
      msg.mode = config.mode;
      std::vector<double> params = local.Parameters();
      switch (config.mode) {
        case AggregationMode::kNoHc:
          msg.parameters = std::move(params);
          break;
        case AggregationMode::kGaussianDp:
          sigma2[node] = NodeSigma2(config, parts[node].size());
          ApplyGaussianNoise(params, sigma2[node], state.noise_rng);
          msg.parameters = std::move(params);
          break;
        case AggregationMode::kHashComb: {
          std::vector<HashComb> combs;
          combs.reserve(params.size());
          for (double w : params) {
            const double clamped = std::clamp(w, scheme->c_min(), scheme->c_max());
            const int level = config.hc_fixed_level
                                  ? *config.hc_fixed_level
                                  : ClampLevel(SampleLevel(state.level_rng, *scheme));
            combs.push_back(tables->Encode(clamped, level));
          }
          msg.records = SerializeRoundPayload(combs);
          break;
        }
      }
    });

    // Server side: only the wire payloads are used from here on.
    std::vector<double> next;
    std::size_t bytes = 0;
    for (const auto& msg : messages) bytes += msg.payload_bytes();
    if (config.mode == AggregationMode::kHashComb) {
      std::vector<std::vector<HashComb>> received;
      for (const auto& msg : messages) {
        received.push_back(ParseRoundPayload(msg.records));
        if (received.back().size() != dim) {
          throw std::invalid_argument("node sent a wrong parameter count");
        }
      }
      next = FedAvgHashed(received, *tables);
    } else {
      std::vector<std::vector<double>> received;
      for (auto& msg : messages) received.push_back(std::move(msg.parameters));
      next = FedAvg(received);
    }
    global.SetParameters(next);
    if (!global.AllFinite()) {
      throw TrainingDivergence("aggregated model is not finite");
    }

    RoundMetrics rm;
    rm.round = round;
    rm.metrics = Evaluate(global, test);
    rm.payload_bytes = bytes;
    rm.wall_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
    result.dp_sigma2 = *std::max_element(sigma2.begin(), sigma2.end());
    result.rounds.push_back(rm);
    if (on_round) on_round(rm);
  }
  result.final_parameters = global.Parameters();
  return result;
}

}  // namespace hashcomb
