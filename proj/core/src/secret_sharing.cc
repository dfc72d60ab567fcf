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

#include "hashcomb/secret_sharing.h"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace hashcomb {
namespace {

constexpr std::uint64_t kMinFixedPointModulus = std::uint64_t{1} << 60;

void CheckFixedPointModulus(std::uint64_t modulus) {
  if (modulus < kMinFixedPointModulus) {
    throw std::invalid_argument("fixed-point encoding needs a modulus >= 2^60");
  }
}

}  // namespace

ShareSet ShareSecretWithCoefficients(
    std::uint64_t secret, std::span<const std::uint64_t> coefficients, int n,
    std::uint64_t modulus) {
  const PrimeField field(modulus);
  const auto t = static_cast<int>(coefficients.size());
  if (n < 1) throw std::invalid_argument("need at least one party");
  if (modulus <= static_cast<std::uint64_t>(n)) {
    throw std::invalid_argument("modulus must exceed the number of parties");
  }
  if (t >= n) {
    throw std::invalid_argument("threshold t=" + std::to_string(t) +
                                " must be below n=" + std::to_string(n));
  }
  if (secret >= modulus) {
    throw std::invalid_argument("secret is not a field element");
  }
  for (std::uint64_t a : coefficients) {
    if (a >= modulus) {
      throw std::invalid_argument("coefficient is not a field element");
    }
  }
  ShareSet shares;
  shares.reserve(n);
  for (int i = 1; i <= n; ++i) {
    // Horner: a_0 + x (a_1 + x (a_2 + ...)).
    const auto x = static_cast<std::uint64_t>(i);
    std::uint64_t y = 0;
    for (int k = t - 1; k >= 0; --k) {
      y = field.Add(field.Mul(y, x), coefficients[k]);
    }
    y = field.Add(field.Mul(y, x), secret);
    shares.push_back({x, y, modulus});
  }
  return shares;
}

std::uint64_t LagrangeBasisAt(std::span<const std::uint64_t> xs, std::size_t j,
                              std::uint64_t x, const PrimeField& field) {
  std::uint64_t num = 1;
  std::uint64_t den = 1;
  const std::uint64_t xj = field.Reduce(xs[j]);
  for (std::size_t m = 0; m < xs.size(); ++m) {
    if (m == j) continue;
    const std::uint64_t xm = field.Reduce(xs[m]);
    num = field.Mul(num, field.Sub(field.Reduce(x), xm));
    den = field.Mul(den, field.Sub(xj, xm));
  }
  return field.Mul(num, field.Inverse(den));
}

std::uint64_t Reconstruct(std::span<const Share> shares, std::uint64_t modulus) {
  if (shares.empty()) throw std::invalid_argument("no shares to reconstruct");
  const PrimeField field(modulus);
  std::vector<std::uint64_t> xs;
  std::set<std::uint64_t> seen;
  for (const Share& s : shares) {
    if (s.modulus != modulus) {
      throw std::invalid_argument("share modulus mismatch");
    }
    if (s.party_id == 0 || s.party_id >= modulus) {
      throw std::invalid_argument("share party id outside [1, p)");
    }
    if (!seen.insert(s.party_id).second) {
      throw std::invalid_argument("duplicate party id " +
                                  std::to_string(s.party_id));
    }
    xs.push_back(s.party_id);
  }
  std::uint64_t secret = 0;
  for (std::size_t j = 0; j < shares.size(); ++j) {
    secret = field.Add(secret, field.Mul(field.Reduce(shares[j].value),
                                         LagrangeBasisAt(xs, j, 0, field)));
  }
  return secret;
}

std::uint64_t Reconstruct(std::span<const Share> shares, int t,
                          std::uint64_t modulus) {
  if (t < 0 || shares.size() < static_cast<std::size_t>(t) + 1) {
    throw std::invalid_argument("insufficient shares: have " +
                                std::to_string(shares.size()) + ", need " +
                                std::to_string(t + 1));
  }
  return Reconstruct(shares.first(static_cast<std::size_t>(t) + 1), modulus);
}

std::uint64_t FixedPointOffset(std::uint64_t modulus) { return modulus / 2; }

std::uint64_t EncodeFixed(double x, std::uint64_t modulus) {
  CheckFixedPointModulus(modulus);
  if (!std::isfinite(x) || std::fabs(x) > kFixedPointMaxMagnitude) {
    throw std::overflow_error("value outside the fixed-point range");
  }
  const auto scaled =
      static_cast<std::int64_t>(std::llround(std::ldexp(x, kFixedPointFractionBits)));
  const std::uint64_t offset = FixedPointOffset(modulus);
  return scaled >= 0 ? offset + static_cast<std::uint64_t>(scaled)
                     : offset - static_cast<std::uint64_t>(-scaled);
}

double DecodeFixed(std::uint64_t element, std::uint64_t modulus) {
  CheckFixedPointModulus(modulus);
  if (element >= modulus) {
    throw std::invalid_argument("not a field element");
  }
  const std::uint64_t offset = FixedPointOffset(modulus);
  const double magnitude =
      element >= offset ? static_cast<double>(element - offset)
                        : -static_cast<double>(offset - element);
  return std::ldexp(magnitude, -kFixedPointFractionBits);
}

}  // namespace hashcomb
