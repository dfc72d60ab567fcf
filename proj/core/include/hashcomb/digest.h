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

#ifndef HASHCOMB_DIGEST_H_
#define HASHCOMB_DIGEST_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace hashcomb {

// Name of the digest function, recorded in run manifests.
inline constexpr std::string_view kDigestAlgorithm = "SHA-256";
inline constexpr std::size_t kDigestSize = 32;

using Digest = std::array<std::uint8_t, kDigestSize>;

Digest Sha256(std::span<const std::uint8_t> data);
std::string ToHex(std::span<const std::uint8_t> bytes);

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    // Digests are uniformly distributed; the leading bytes suffice.
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(h); ++i) h = (h << 8) | d[i];
    return h;
  }
};

}  // namespace hashcomb

#endif  // HASHCOMB_DIGEST_H_
