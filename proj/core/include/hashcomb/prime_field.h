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

#ifndef HASHCOMB_PRIME_FIELD_H_
#define HASHCOMB_PRIME_FIELD_H_

#include <cstdint>

namespace hashcomb {

// 2^61 - 1.
inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

// Deterministic Miller-Rabin for 64-bit inputs.
bool IsPrime(std::uint64_t n);

// Arithmetic in Z_p for a prime p < 2^63.
class PrimeField {
 public:
  // Throws std::invalid_argument if modulus is not a prime below 2^63.
  explicit PrimeField(std::uint64_t modulus);

  std::uint64_t modulus() const { return p_; }

  std::uint64_t Add(std::uint64_t a, std::uint64_t b) const {
    const std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t Sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + (p_ - b);
  }
  std::uint64_t Mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % p_);
  }
  std::uint64_t Pow(std::uint64_t base, std::uint64_t exp) const;
  // Throws std::domain_error for zero.
  std::uint64_t Inverse(std::uint64_t a) const;
  std::uint64_t Reduce(std::uint64_t a) const { return a % p_; }

 private:
  std::uint64_t p_;
};

}  // namespace hashcomb

#endif  // HASHCOMB_PRIME_FIELD_H_
