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

#ifndef HASHCOMB_SECRET_SHARING_H_
#define HASHCOMB_SECRET_SHARING_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hashcomb/prime_field.h"

namespace hashcomb {

// Point (party_id, q(party_id)) of a Shamir sharing over Z_modulus.
struct Share {
  std::uint64_t party_id = 0;
  std::uint64_t value = 0;
  std::uint64_t modulus = 0;

  bool operator==(const Share&) const = default;
};

using ShareSet = std::vector<Share>;

// Shares of q(x) = secret + sum_k coefficients[k-1] x^k for parties 1..n.
// The degree t is coefficients.size(). Throws std::invalid_argument when
// the modulus is not prime, modulus <= n, t >= n, secret >= modulus or a
// coefficient is not reduced.
ShareSet ShareSecretWithCoefficients(std::uint64_t secret,
                                     std::span<const std::uint64_t> coefficients,
                                     int n, std::uint64_t modulus);

// Degree-t sharing with a_1..a_t drawn uniformly from Z_modulus.
template <typename Urbg>
ShareSet ShareSecret(std::uint64_t secret, int t, int n, std::uint64_t modulus,
                     Urbg& rng) {
  std::vector<std::uint64_t> coefficients(t < 0 ? 0 : t);
  std::uniform_int_distribution<std::uint64_t> uniform(
      0, modulus == 0 ? 0 : modulus - 1);
  for (auto& a : coefficients) a = uniform(rng);
  return ShareSecretWithCoefficients(secret, coefficients, n, modulus);
}

// Lagrange basis polynomial j for the nodes xs, evaluated at x.
std::uint64_t LagrangeBasisAt(std::span<const std::uint64_t> xs, std::size_t j,
                              std::uint64_t x, const PrimeField& field);

// Interpolates q(0) through every given share. Throws std::invalid_argument
// on an empty set, duplicate party ids or a modulus mismatch.
std::uint64_t Reconstruct(std::span<const Share> shares, std::uint64_t modulus);

// As above but first checks that at least t + 1 shares are present and
// interpolates through exactly t + 1 of them.
std::uint64_t Reconstruct(std::span<const Share> shares, int t,
                          std::uint64_t modulus);

// Fixed-point embedding of reals into Z_p: round(x * 2^32) shifted by the
// constant floor(p / 2). Requires |x| <= 2^20 and p >= 2^60.
inline constexpr int kFixedPointFractionBits = 32;
inline constexpr double kFixedPointMaxMagnitude = 1048576.0;  // 2^20
std::uint64_t FixedPointOffset(std::uint64_t modulus);
std::uint64_t EncodeFixed(double x, std::uint64_t modulus);
double DecodeFixed(std::uint64_t element, std::uint64_t modulus);

}  // namespace hashcomb

#endif  // HASHCOMB_SECRET_SHARING_H_
