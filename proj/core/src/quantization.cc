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

#include "hashcomb/quantization.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "byte_io.h"

namespace hashcomb {
namespace {

void CheckLevel(int level, int max_level) {
  if (level < 0 || level > max_level) {
    throw std::invalid_argument("quantization level " + std::to_string(level) +
                                " outside [0, " + std::to_string(max_level) +
                                "]");
  }
}

double LowerBound(const QuantizationScheme& scheme, int level,
                  std::uint64_t index) {
  return scheme.c_min() +
         static_cast<double>(index) * scheme.ChannelWidth(level);
}

}  // namespace

std::pair<double, double> EnlargeRange(double x_min, double x_max,
                                       double delta) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) ||
      !std::isfinite(delta)) {
    throw std::invalid_argument("EnlargeRange: non-finite input");
  }
  if (delta < 0) {
    throw std::invalid_argument("EnlargeRange: delta must be >= 0");
  }
  if (x_min > x_max) {
    throw std::invalid_argument("EnlargeRange: x_min > x_max");
  }
  return {x_min - delta, x_max + delta};
}

QuantizationScheme QuantizationScheme::FromSourceRange(
    double x_min, double x_max, double delta, int max_level,
    double selection_p, const Salt& salt) {
  auto [c_min, c_max] = EnlargeRange(x_min, x_max, delta);
  if (!(c_min < c_max)) {
    throw std::invalid_argument(
        "QuantizationScheme: enlarged range has zero width");
  }
  if (!std::isfinite(c_max - c_min)) {
    throw std::invalid_argument("QuantizationScheme: range overflows");
  }
  if (max_level < 1 || max_level > kMaxSupportedLevel) {
    throw std::invalid_argument("QuantizationScheme: max_level out of range");
  }
  if (!(selection_p > 0.0 && selection_p <= 1.0)) {
    throw std::invalid_argument(
        "QuantizationScheme: selection_p must be in (0, 1]");
  }
  QuantizationScheme scheme;
  scheme.c_min_ = c_min;
  scheme.c_max_ = c_max;
  scheme.delta_ = delta;
  scheme.max_level_ = max_level;
  scheme.selection_p_ = selection_p;
  scheme.salt_ = salt;
  return scheme;
}

double QuantizationScheme::ChannelWidth(int level) const {
  return std::ldexp(span(), -level);
}

ChannelBounds BoundsOf(const ChannelRef& channel,
                       const QuantizationScheme& scheme) {
  CheckLevel(channel.level, scheme.max_level());
  const std::uint64_t count = QuantizationScheme::ChannelCount(channel.level);
  if (channel.index >= count) {
    throw std::invalid_argument("channel index out of range for its level");
  }
  const double lower = LowerBound(scheme, channel.level, channel.index);
  const double upper = channel.index + 1 == count
                           ? scheme.c_max()
                           : LowerBound(scheme, channel.level,
                                        channel.index + 1);
  return {lower, upper};
}

ChannelRef ChannelOf(double x, const QuantizationScheme& scheme, int level) {
  CheckLevel(level, scheme.max_level());
  if (!(x >= scheme.c_min() && x <= scheme.c_max())) {
    throw std::out_of_range("value outside the quantization range");
  }
  const std::uint64_t count = QuantizationScheme::ChannelCount(level);
  // Scaling by 2^level is exact, so the estimate nests across levels; the
  // correction below aligns it with the bounds used for hashing.
  const double scaled = std::ldexp((x - scheme.c_min()) / scheme.span(), level);
  std::uint64_t index =
      scaled <= 0 ? 0 : static_cast<std::uint64_t>(std::floor(scaled));
  if (index >= count) index = count - 1;
  while (index > 0 && x < LowerBound(scheme, level, index)) --index;
  while (index + 1 < count && x >= LowerBound(scheme, level, index + 1)) {
    ++index;
  }
  return {level, index};
}

double MidpointOf(const ChannelRef& channel, const QuantizationScheme& scheme) {
  BoundsOf(channel, scheme);  // validates
  return scheme.c_min() + (static_cast<double>(channel.index) + 0.5) *
                              scheme.ChannelWidth(channel.level);
}

int LastHeadPosition(std::span<const bool> tosses) {
  for (std::size_t i = tosses.size(); i > 0; --i) {
    if (tosses[i - 1]) return static_cast<int>(i);
  }
  return 0;
}

double ExpectedLevel(double p, int max_level) {
  if (!(p > 0.0 && p <= 1.0) || max_level < 1) {
    throw std::invalid_argument("ExpectedLevel: need p in (0,1], L >= 1");
  }
  double sum = 0.0;
  double tail = 1.0;  // (1 - p)^i
  for (int i = 0; i <= max_level; ++i) {
    sum += static_cast<double>(max_level - i) * p * tail;
    tail *= 1.0 - p;
  }
  return sum;
}

double LevelProbability(double p, int max_level, int level) {
  CheckLevel(level, max_level);
  if (level == 0) return std::pow(1.0 - p, max_level);
  return p * std::pow(1.0 - p, max_level - level);
}

double SolveBias(double target_mean, int max_level) {
  if (max_level < 1) throw std::invalid_argument("SolveBias: L must be >= 1");
  if (!(target_mean > 0.0 && target_mean < max_level)) {
    throw std::domain_error("SolveBias: target mean " +
                            std::to_string(target_mean) +
                            " is unreachable for L = " +
                            std::to_string(max_level));
  }
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (ExpectedLevel(mid, max_level) < target_mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<std::uint8_t> SerializePublicScheme(
    const QuantizationScheme& scheme) {
  std::vector<std::uint8_t> out;
  internal::PutF64(out, scheme.c_min());
  internal::PutF64(out, scheme.c_max());
  internal::PutF64(out, scheme.delta());
  out.push_back(static_cast<std::uint8_t>(scheme.max_level()));
  internal::PutF64(out, scheme.selection_p());
  return out;
}

std::vector<std::uint8_t> SerializeScheme(const QuantizationScheme& scheme) {
  auto out = SerializePublicScheme(scheme);
  out.insert(out.end(), scheme.salt().begin(), scheme.salt().end());
  return out;
}

}  // namespace hashcomb
