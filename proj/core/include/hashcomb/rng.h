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

#ifndef HASHCOMB_RNG_H_
#define HASHCOMB_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace hashcomb {

// Independent named streams derived from one run seed.
enum class RngStream : std::uint32_t {
  kModelInit = 1,
  kSplit = 2,
  kPartition = 3,
  kNodeTraining = 4,
  kLevelSampling = 5,
  kDpNoise = 6,
  kNegotiation = 7,
};

inline std::mt19937_64 DeriveRng(std::uint64_t seed, RngStream stream,
                                 std::initializer_list<std::uint64_t> tags = {}) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32),
                                   static_cast<std::uint32_t>(stream)};
  for (std::uint64_t tag : tags) {
    words.push_back(static_cast<std::uint32_t>(tag));
    words.push_back(static_cast<std::uint32_t>(tag >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace hashcomb

#endif  // HASHCOMB_RNG_H_
