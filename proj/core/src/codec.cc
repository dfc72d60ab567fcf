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

#include "hashcomb/codec.h"

#include <algorithm>
#include <string>

#include "byte_io.h"

namespace hashcomb {
namespace {

void CheckEncodeLevel(int level, const QuantizationScheme& scheme) {
  if (level < 1 || level > scheme.max_level()) {
    throw std::invalid_argument("Hash-Comb level " + std::to_string(level) +
                                " outside [1, " +
                                std::to_string(scheme.max_level()) + "]");
  }
}

}  // namespace

Digest ChannelDigest(const ChannelRef& channel,
                     const QuantizationScheme& scheme) {
  const ChannelBounds bounds = BoundsOf(channel, scheme);
  std::vector<std::uint8_t> input;
  input.reserve(1 + 8 + scheme.salt().size() + 8);
  input.push_back(static_cast<std::uint8_t>(channel.level));
  internal::PutF64(input, bounds.lower);
  input.insert(input.end(), scheme.salt().begin(), scheme.salt().end());
  internal::PutF64(input, bounds.upper);
  return Sha256(input);
}

HashComb Encode(double w, int level, const QuantizationScheme& scheme) {
  CheckEncodeLevel(level, scheme);
  HashComb comb;
  comb.level = level;
  comb.chain.reserve(level);
  for (int l = 1; l <= level; ++l) {
    comb.chain.push_back(ChannelDigest(ChannelOf(w, scheme, l), scheme));
  }
  return comb;
}

DigestTable DigestTable::Build(int level, const QuantizationScheme& scheme) {
  CheckEncodeLevel(level, scheme);
  DigestTable table;
  table.level_ = level;
  const std::uint64_t count = QuantizationScheme::ChannelCount(level);
  table.by_index_.reserve(count);
  table.by_digest_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const ChannelRef channel{level, i};
    Digest digest = ChannelDigest(channel, scheme);
    auto [it, inserted] =
        table.by_digest_.emplace(digest, Entry{i, MidpointOf(channel, scheme)});
    if (!inserted) {
      throw DigestCollisionError("digest collision at level " +
                                 std::to_string(level) + " between channels " +
                                 std::to_string(it->second.index) + " and " +
                                 std::to_string(i));
    }
    table.by_index_.push_back(digest);
  }
  return table;
}

const DigestTable::Entry* DigestTable::Find(const Digest& digest) const {
  auto it = by_digest_.find(digest);
  return it == by_digest_.end() ? nullptr : &it->second;
}

DigestTableSet::DigestTableSet(const QuantizationScheme& scheme,
                               std::span<const int> levels)
    : scheme_(scheme) {
  for (int level : levels) {
    if (!tables_.contains(level)) {
      tables_.emplace(level, DigestTable::Build(level, scheme_));
    }
  }
}

DigestTableSet DigestTableSet::AllLevels(const QuantizationScheme& scheme) {
  std::vector<int> levels;
  for (int l = 1; l <= scheme.max_level(); ++l) levels.push_back(l);
  return DigestTableSet(scheme, levels);
}

const DigestTable* DigestTableSet::ForLevel(int level) const {
  auto it = tables_.find(level);
  return it == tables_.end() ? nullptr : &it->second;
}

HashComb DigestTableSet::Encode(double w, int level) const {
  CheckEncodeLevel(level, scheme_);
  HashComb comb;
  comb.level = level;
  comb.chain.reserve(level);
  for (int l = 1; l <= level; ++l) {
    const ChannelRef channel = ChannelOf(w, scheme_, l);
    const DigestTable* table = ForLevel(l);
    comb.chain.push_back(table != nullptr ? table->DigestAt(channel.index)
                                          : ChannelDigest(channel, scheme_));
  }
  return comb;
}

double Decode(const HashComb& comb, const DigestTableSet& tables) {
  if (comb.level < 1 ||
      comb.chain.size() != static_cast<std::size_t>(comb.level)) {
    throw std::invalid_argument("malformed Hash-Comb: chain length " +
                                std::to_string(comb.chain.size()) +
                                " for level " + std::to_string(comb.level));
  }
  const DigestTable* table = tables.ForLevel(comb.level);
  if (table == nullptr) {
    throw std::invalid_argument("no digest table for level " +
                                std::to_string(comb.level));
  }
  const DigestTable::Entry* entry = table->Find(comb.chain.back());
  if (entry == nullptr) {
    throw UnknownDigestError("unknown digest " + ToHex(comb.chain.back()) +
                             " at level " + std::to_string(comb.level));
  }
  return entry->midpoint;
}

void AppendRecord(const HashComb& comb, std::vector<std::uint8_t>& out) {
  if (comb.level < 1 || comb.level > 255 ||
      comb.chain.size() != static_cast<std::size_t>(comb.level)) {
    throw std::invalid_argument("cannot serialize malformed Hash-Comb");
  }
  out.push_back(static_cast<std::uint8_t>(comb.level));
  for (const Digest& d : comb.chain) out.insert(out.end(), d.begin(), d.end());
}

std::vector<std::uint8_t> SerializeRoundPayload(
    std::span<const HashComb> combs) {
  std::vector<std::uint8_t> out;
  std::size_t bytes = 4;
  for (const HashComb& c : combs) bytes += 1 + c.chain.size() * kDigestSize;
  out.reserve(bytes);
  internal::PutU32(out, static_cast<std::uint32_t>(combs.size()));
  for (const HashComb& c : combs) AppendRecord(c, out);
  return out;
}

std::vector<HashComb> ParseRoundPayload(std::span<const std::uint8_t> bytes) {
  internal::ByteReader reader(bytes);
  const std::uint32_t count = reader.U32();
  std::vector<HashComb> combs;
  combs.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    HashComb comb;
    comb.level = reader.U8();
    if (comb.level == 0) {
      throw std::invalid_argument("Hash-Comb record with level 0");
    }
    comb.chain.resize(comb.level);
    for (Digest& d : comb.chain) {
      auto raw = reader.Take(kDigestSize);
      std::copy(raw.begin(), raw.end(), d.begin());
    }
    combs.push_back(std::move(comb));
  }
  if (!reader.done()) {
    throw std::invalid_argument("trailing bytes after round payload");
  }
  return combs;
}

}  // namespace hashcomb
