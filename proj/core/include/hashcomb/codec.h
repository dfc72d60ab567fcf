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

#ifndef HASHCOMB_CODEC_H_
#define HASHCOMB_CODEC_H_

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hashcomb/digest.h"
#include "hashcomb/quantization.h"

namespace hashcomb {

// Decoding met a digest that no table knows: the sender used a different
// scheme (salt, range or level set), i.e. negotiation failed.
class UnknownDigestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two channels of one level hashed to the same digest.
class DigestCollisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-parameter encoding: the digests of the channels containing the value
// at levels 1..level, coarsest first.
struct HashComb {
  int level = 0;
  std::vector<Digest> chain;

  bool operator==(const HashComb&) const = default;
};

// SHA-256 of  level (1 byte) || lower bound (f64 BE) || salt (16 bytes) ||
// upper bound (f64 BE).
Digest ChannelDigest(const ChannelRef& channel,
                     const QuantizationScheme& scheme);

// Throws std::out_of_range when w is outside [c_min, c_max] and
// std::invalid_argument unless 1 <= level <= max_level.
HashComb Encode(double w, int level, const QuantizationScheme& scheme);

// Inverse of ChannelDigest for one level.
class DigestTable {
 public:
  struct Entry {
    std::uint64_t index;
    double midpoint;
  };

  // Throws DigestCollisionError if two channels share a digest.
  static DigestTable Build(int level, const QuantizationScheme& scheme);

  int level() const { return level_; }
  std::size_t size() const { return by_digest_.size(); }
  // nullptr when the digest is not a channel of this level.
  const Entry* Find(const Digest& digest) const;
  const Digest& DigestAt(std::uint64_t index) const { return by_index_[index]; }

 private:
  int level_ = 0;
  std::unordered_map<Digest, Entry, DigestHash> by_digest_;
  std::vector<Digest> by_index_;
};

// The server-side decoding state for one negotiated scheme. Also serves as
// an encoding cache: Encode() here is byte-identical to hashcomb::Encode().
class DigestTableSet {
 public:
  DigestTableSet(const QuantizationScheme& scheme, std::span<const int> levels);
  // Every level in [1, max_level].
  static DigestTableSet AllLevels(const QuantizationScheme& scheme);

  const QuantizationScheme& scheme() const { return scheme_; }
  const DigestTable* ForLevel(int level) const;
  bool HasLevel(int level) const { return ForLevel(level) != nullptr; }

  HashComb Encode(double w, int level) const;

 private:
  QuantizationScheme scheme_;
  std::map<int, DigestTable> tables_;
};

// Midpoint of the channel named by the last digest of the chain. Throws
// UnknownDigestError for a digest outside the tables and
// std::invalid_argument for a malformed HashComb or missing level table.
double Decode(const HashComb& comb, const DigestTableSet& tables);

// Wire format. Record: level k (1 byte) then k 32-byte digests. Round
// payload: record count (u32 BE) then records in parameter order.
void AppendRecord(const HashComb& comb, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> SerializeRoundPayload(
    std::span<const HashComb> combs);
// Throws std::invalid_argument on malformed input.
std::vector<HashComb> ParseRoundPayload(std::span<const std::uint8_t> bytes);

}  // namespace hashcomb

#endif  // HASHCOMB_CODEC_H_
