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

#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "hashcomb/digest.h"

namespace hashcomb {
namespace {

Salt TestSalt() {
  Salt s{};
  for (int i = 0; i < 16; ++i) s[i] = static_cast<std::uint8_t>(i);
  return s;
}

QuantizationScheme Unit(Salt salt = TestSalt()) {
  return QuantizationScheme::FromSourceRange(-1.0, 1.0, 0.0, 16, 0.5, salt);
}

TEST(DigestTest, KnownSha256Vectors) {
  EXPECT_EQ(ToHex(Sha256({})),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const std::uint8_t abc[] = {'a', 'b', 'c'};
  EXPECT_EQ(ToHex(Sha256(abc)),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ChannelDigestTest, MatchesIndependentHash) {
  // Digests of the 33-byte preimage computed with Python's hashlib.
  const QuantizationScheme s = Unit();
  EXPECT_EQ(ToHex(ChannelDigest({1, 0}, s)),
            "168929a5680b35816c0d65c4f96ef4855d0fcb93b5f3e9b28d4fbd177190b06b");
  EXPECT_EQ(ToHex(ChannelDigest({3, 6}, s)),
            "7af6e4b3a67190520cc54473672f0f7a17f6959cf9641a2663c87d565eaa7290");
}

TEST(EncodeTest, ChainHoldsEveryCoarserChannel) {
  const QuantizationScheme s = Unit();
  const HashComb comb = Encode(0.3, 6, s);
  EXPECT_EQ(comb.level, 6);
  ASSERT_EQ(comb.chain.size(), 6u);
  for (int level = 1; level <= 6; ++level) {
    EXPECT_EQ(comb.chain[level - 1],
              ChannelDigest(ChannelOf(0.3, s, level), s));
  }
}

TEST(EncodeTest, RejectsBadLevelAndRange) {
  const QuantizationScheme s = Unit();
  EXPECT_THROW(Encode(0.0, 0, s), std::invalid_argument);
  EXPECT_THROW(Encode(0.0, 17, s), std::invalid_argument);
  EXPECT_THROW(Encode(1.5, 4, s), std::out_of_range);
}

TEST(DigestTableTest, RoundTripAndCache) {
  const QuantizationScheme s = Unit();
  const DigestTableSet tables = DigestTableSet::AllLevels(s);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> lv(1, 16);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng);
    const int level = lv(rng);
    const HashComb comb = Encode(x, level, s);
    EXPECT_EQ(tables.Encode(x, level), comb);
    EXPECT_EQ(Decode(comb, tables), MidpointOf(ChannelOf(x, s, level), s));
  }
}

TEST(DigestTableTest, TableSizesAndDistinctDigests) {
  const QuantizationScheme s = Unit();
  for (int level = 1; level <= 10; ++level) {
    const DigestTable t = DigestTable::Build(level, s);
    EXPECT_EQ(t.size(), QuantizationScheme::ChannelCount(level));
    std::set<Digest> seen;
    for (std::uint64_t i = 0; i < t.size(); ++i) seen.insert(t.DigestAt(i));
    EXPECT_EQ(seen.size(), t.size());
  }
}

TEST(DecodeTest, ForeignSaltIsRejected) {
  Salt other = TestSalt();
  other[15] ^= 1;
  const HashComb comb = Encode(0.1, 8, Unit(other));
  const DigestTableSet tables = DigestTableSet::AllLevels(Unit());
  EXPECT_THROW(Decode(comb, tables), UnknownDigestError);
}

TEST(DecodeTest, MissingTableAndMalformedComb) {
  const QuantizationScheme s = Unit();
  const int levels[] = {1, 2, 3};
  const DigestTableSet tables(s, levels);
  EXPECT_THROW(Decode(Encode(0.1, 5, s), tables), std::invalid_argument);
  HashComb bad = Encode(0.1, 3, s);
  bad.chain.pop_back();
  EXPECT_THROW(Decode(bad, tables), std::invalid_argument);
}

TEST(WireTest, RoundTrip) {
  const QuantizationScheme s = Unit();
  std::vector<HashComb> combs;
  for (int i = 1; i <= 16; ++i) combs.push_back(Encode(-0.9 + 0.1 * i, i, s));
  const auto bytes = SerializeRoundPayload(combs);
  std::size_t expected = 4;
  for (const auto& c : combs) expected += 1 + 32 * c.chain.size();
  EXPECT_EQ(bytes.size(), expected);
  EXPECT_EQ(ParseRoundPayload(bytes), combs);
}

TEST(WireTest, RejectsMalformedPayloads) {
  const QuantizationScheme s = Unit();
  const std::vector<HashComb> combs = {Encode(0.2, 3, s)};
  auto bytes = SerializeRoundPayload(combs);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(ParseRoundPayload(truncated), std::invalid_argument);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(ParseRoundPayload(trailing), std::invalid_argument);
  auto zero_level = bytes;
  zero_level[4] = 0;
  EXPECT_THROW(ParseRoundPayload(zero_level), std::invalid_argument);
  EXPECT_THROW(ParseRoundPayload(std::vector<std::uint8_t>{0, 0}),
               std::invalid_argument);
}

}  // namespace
}  // namespace hashcomb
