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

#ifndef HASHCOMB_QUANTIZATION_H_
#define HASHCOMB_QUANTIZATION_H_

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace hashcomb {

inline constexpr int kDefaultMaxLevel = 16;
// Largest level whose channel index still fits comfortably in 64 bits and
// whose channel width is representable for any reasonable range.
inline constexpr int kMaxSupportedLevel = 48;

// 128-bit secret mixed into every channel digest.
using Salt = std::array<std::uint8_t, 16>;

// Widens [x_min, x_max] by `delta` on both sides. Throws
// std::invalid_argument on non-finite input, delta < 0 or x_min > x_max.
std::pair<double, double> EnlargeRange(double x_min, double x_max,
                                       double delta);

// Shared hyper-parameters of the randomized multi-level quantization.
// Immutable once built; safe to share across node workers.
class QuantizationScheme {
 public:
  // Builds a scheme on the enlarged range [x_min - delta, x_max + delta].
  // Throws std::invalid_argument when the enlarged range has zero width,
  // when max_level is outside [1, kMaxSupportedLevel] or when selection_p
  // is outside (0, 1].
  static QuantizationScheme FromSourceRange(double x_min, double x_max,
                                            double delta, int max_level,
                                            double selection_p,
                                            const Salt& salt);

  double c_min() const { return c_min_; }
  double c_max() const { return c_max_; }
  double delta() const { return delta_; }
  int max_level() const { return max_level_; }
  double selection_p() const { return selection_p_; }
  const Salt& salt() const { return salt_; }

  double span() const { return c_max_ - c_min_; }
  // Width of each of the 2^level channels.
  double ChannelWidth(int level) const;
  static std::uint64_t ChannelCount(int level) {
    return std::uint64_t{1} << level;
  }

  bool operator==(const QuantizationScheme&) const = default;

 private:
  QuantizationScheme() = default;

  double c_min_ = 0.0;
  double c_max_ = 1.0;
  double delta_ = 0.0;
  int max_level_ = kDefaultMaxLevel;
  double selection_p_ = 1.0;
  Salt salt_{};
};

struct ChannelRef {
  int level = 0;
  std::uint64_t index = 0;

  bool operator==(const ChannelRef&) const = default;
};

struct ChannelBounds {
  double lower;
  double upper;
};

// Half-open [lower, upper) bounds of a channel. The topmost channel of a
// level is closed above and ends exactly at c_max. Throws
// std::invalid_argument for an invalid ChannelRef.
ChannelBounds BoundsOf(const ChannelRef& channel,
                       const QuantizationScheme& scheme);

// Channel of `x` at `level`. Membership agrees with BoundsOf() exactly.
// Throws std::out_of_range when x is outside [c_min, c_max] and
// std::invalid_argument when level is outside [0, max_level].
ChannelRef ChannelOf(double x, const QuantizationScheme& scheme, int level);

// c_min + (index + 0.5) * width(level).
double MidpointOf(const ChannelRef& channel, const QuantizationScheme& scheme);

// Position (1-based) of the last head in a toss sequence; 0 if no head.
int LastHeadPosition(std::span<const bool> tosses);

// Levels live in [1, L]; the all-tails outcome is moved to 1.
inline int ClampLevel(int raw_level) { return raw_level < 1 ? 1 : raw_level; }

// Tosses a coin with head probability selection_p max_level times and
// returns the last-head position (raw, may be 0).
template <typename Urbg>
int SampleLevel(Urbg& rng, const QuantizationScheme& scheme) {
  std::bernoulli_distribution coin(scheme.selection_p());
  int last_head = 0;
  for (int toss = 1; toss <= scheme.max_level(); ++toss) {
    if (coin(rng)) last_head = toss;
  }
  return last_head;
}

// Mean last-head position: sum_{i=0}^{L} (L - i) p (1 - p)^i.
double ExpectedLevel(double p, int max_level);

// Probability that the last head lands on toss `level` (0 = no head).
double LevelProbability(double p, int max_level, int level);

// Head probability whose ExpectedLevel equals target_mean, by bisection on
// (0, 1) to absolute tolerance 1e-12. Throws std::domain_error when the
// target is outside (0, max_level).
double SolveBias(double target_mean, int max_level);

// Canonical byte serialization (big-endian fields, salt last).
std::vector<std::uint8_t> SerializeScheme(const QuantizationScheme& scheme);
// Same as SerializeScheme() without the salt; safe to publish.
std::vector<std::uint8_t> SerializePublicScheme(
    const QuantizationScheme& scheme);

}  // namespace hashcomb

#endif  // HASHCOMB_QUANTIZATION_H_
