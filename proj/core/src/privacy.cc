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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "hashcomb/federation.h"
#include "json.hpp"

namespace hashcomb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be finite, > 0 and != 1");
  }
}

// ln(p^alpha q^(1-alpha)); nullopt for a vanishing term, +inf for an
// unbounded one.
std::optional<double> LogTerm(double p, double q, double alpha) {
  if (p == 0.0) return std::nullopt;
  if (q == 0.0) {
    if (alpha > 1.0) return kInf;
    return std::nullopt;
  }
  if (p == q) return std::log(p);
  return alpha * std::log(p) + (1.0 - alpha) * std::log(q);
}

class TermAccumulator {
 public:
  explicit TermAccumulator(double alpha) : alpha_(alpha) {}

  void Add(double p, double q) {
    const auto t = LogTerm(p, q, alpha_);
    if (!t) return;
    if (*t == kInf) unbounded_ = true;
    logs_.push_back(*t);
  }

  double Divergence() const {
    if (unbounded_) return kInf;
    if (logs_.empty()) return alpha_ > 1.0 ? -kInf : kInf;
    const double m = *std::max_element(logs_.begin(), logs_.end());
    ExactSum sum;
    for (double t : logs_) sum.Add(std::exp(t - m));
    return (m + std::log(sum.Result())) / (alpha_ - 1.0);
  }

 private:
  double alpha_;
  bool unbounded_ = false;
  std::vector<double> logs_;
};

nlohmann::json Number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

double EmpiricalDistribution::PMax() const {
  if (frequencies.empty()) return 0.0;
  return *std::max_element(frequencies.begin(), frequencies.end());
}

EmpiricalDistribution QuantizedDistribution(std::span<const double> sample,
                                            const QuantizationScheme& scheme,
                                            int level) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  if (level < 1 || level > std::min(scheme.max_level(), kMaxHistogramLevel)) {
    throw std::invalid_argument("histogram level out of range");
  }
  EmpiricalDistribution d;
  d.level = level;
  d.sample_size = sample.size();
  const std::uint64_t bins = QuantizationScheme::ChannelCount(level);
  d.counts.assign(bins, 0);
  for (double x : sample) ++d.counts[ChannelOf(x, scheme, level).index];
  d.frequencies.resize(bins);
  d.midpoints.resize(bins);
  const double n = static_cast<double>(sample.size());
  for (std::uint64_t h = 0; h < bins; ++h) {
    d.frequencies[h] = static_cast<double>(d.counts[h]) / n;
    d.midpoints[h] = MidpointOf({level, h}, scheme);
  }
  return d;
}

double RenyiDivergence(std::span<const double> p, std::span<const double> q,
                       double alpha) {
  CheckAlpha(alpha);
  if (p.size() != q.size()) {
    throw std::invalid_argument("distributions have different supports");
  }
  if (std::equal(p.begin(), p.end(), q.begin())) return 0.0;
  TermAccumulator acc(alpha);
  for (std::size_t h = 0; h < p.size(); ++h) acc.Add(p[h], q[h]);
  return acc.Divergence();
}

double RenyiDivergence(const EmpiricalDistribution& p,
                       const EmpiricalDistribution& q, double alpha) {
  if (p.level != q.level) {
    throw std::invalid_argument("distributions use different levels");
  }
  return RenyiDivergence(p.frequencies, q.frequencies, alpha);
}

double MaxLogRatio(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("distributions have different supports");
  }
  double best = -kInf;
  for (std::size_t h = 0; h < p.size(); ++h) {
    if (p[h] == 0.0) continue;
    if (q[h] == 0.0) return kInf;
    best = std::max(best, std::log(p[h] / q[h]));
  }
  return best;
}

double AdjacentRenyiDivergence(const EmpiricalDistribution& p,
                               std::uint64_t r, std::uint64_t s, double alpha) {
  CheckAlpha(alpha);
  if (r >= p.counts.size() || s >= p.counts.size()) {
    throw std::out_of_range("channel index out of range");
  }
  if (p.counts[r] == 0) {
    throw std::invalid_argument("removed point's channel is empty");
  }
  if (r == s) return 0.0;
  const double n = static_cast<double>(p.sample_size);
  const double q_r = static_cast<double>(p.counts[r] - 1) / n;
  const double q_s = static_cast<double>(p.counts[s] + 1) / n;
  TermAccumulator acc(alpha);
  for (std::uint64_t h = 0; h < p.counts.size(); ++h) {
    const double p_h = p.frequencies[h];
    if (h == r) {
      acc.Add(p_h, q_r);
    } else if (h == s) {
      acc.Add(p_h, q_s);
    } else {
      acc.Add(p_h, p_h);
    }
  }
  return acc.Divergence();
}

double DivergenceCap(double alpha, std::size_t n, double p_max) {
  CheckAlpha(alpha);
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(p_max > 0.0 && p_max <= 1.0)) {
    throw std::invalid_argument("p_max must be in (0, 1]");
  }
  return std::log(static_cast<double>(n)) / (alpha - 1.0) +
         (2.0 * alpha - 1.0) / (alpha - 1.0) * std::log(p_max);
}

double EpsilonFromPMax(double p_max) {
  if (!(p_max > 0.0)) throw std::invalid_argument("p_max must be positive");
  return 2.0 * std::log(p_max);
}

AdjacentDivergenceReport AdjacentDivergence(std::span<const double> sample,
                                            std::size_t index,
                                            double replacement,
                                            const QuantizationScheme& scheme,
                                            int level,
                                            std::span<const double> alphas) {
  if (index >= sample.size()) {
    throw std::out_of_range("replacement index outside the sample");
  }
  const EmpiricalDistribution p = QuantizedDistribution(sample, scheme, level);
  std::vector<double> adjacent(sample.begin(), sample.end());
  adjacent[index] = replacement;
  const EmpiricalDistribution q =
      QuantizedDistribution(adjacent, scheme, level);

  AdjacentDivergenceReport report;
  report.level = level;
  report.n = sample.size();
  report.p_max = p.PMax();
  report.removed_channel = ChannelOf(sample[index], scheme, level).index;
  report.added_channel = ChannelOf(replacement, scheme, level).index;
  for (double alpha : alphas) {
    AlphaDivergence a;
    a.alpha = alpha;
    a.divergence = RenyiDivergence(p, q, alpha);
    a.adjacent_form = AdjacentRenyiDivergence(p, report.removed_channel,
                                              report.added_channel, alpha);
    a.cap = DivergenceCap(alpha, report.n, report.p_max);
    report.alphas.push_back(a);
  }
  report.d_inf_large_alpha = RenyiDivergence(p, q, kInfinityAlpha);
  report.d_inf_max_ratio = MaxLogRatio(p.frequencies, q.frequencies);
  report.epsilon = EpsilonFromPMax(report.p_max);
  report.epsilon_abs = std::fabs(report.epsilon);
  return report;
}

std::string ReportToJson(const AdjacentDivergenceReport& report) {
  nlohmann::json alphas = nlohmann::json::array();
  for (const AlphaDivergence& a : report.alphas) {
    alphas.push_back({{"alpha", Number(a.alpha)},
                      {"divergence", Number(a.divergence)},
                      {"adjacent_form", Number(a.adjacent_form)},
                      {"cap", Number(a.cap)}});
  }
  nlohmann::json j = {{"level", report.level},
                      {"n", report.n},
                      {"p_max", Number(report.p_max)},
                      {"removed_channel", report.removed_channel},
                      {"added_channel", report.added_channel},
                      {"alphas", alphas},
                      {"d_inf_large_alpha", Number(report.d_inf_large_alpha)},
                      {"d_inf_max_ratio", Number(report.d_inf_max_ratio)},
                      {"epsilon", Number(report.epsilon)},
                      {"epsilon_abs", Number(report.epsilon_abs)}};
  return j.dump(2);
}

}  // namespace hashcomb
