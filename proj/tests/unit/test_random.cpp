// Copyright 2026 The glomnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "glomnet/random.h"

namespace glomnet {
namespace {

// Known-answer vectors for Philox4x32 with 10 rounds, as published with the
// Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, SameTripleSameSequence) {
  RandomStream a(42, stream_tag(StreamPurpose::kTest, 3), 17);
  RandomStream b(42, stream_tag(StreamPurpose::kTest, 3), 17);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u32(), b.next_u32());
}

TEST(RandomStream, DistinctTriplesDiffer) {
  const auto first = [](std::uint64_t seed, std::uint32_t tag, std::uint64_t index) {
    RandomStream r(seed, tag, index);
    return r.next_u64();
  };
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {0ull, 1ull, 0x100000000ull}) {
    for (std::uint32_t tag : {0u, 1u, stream_tag(StreamPurpose::kAugment, 1)}) {
      for (std::uint64_t index : {0ull, 1ull, 0x100000000ull}) seen.insert(first(seed, tag, index));
    }
  }
  EXPECT_EQ(seen.size(), 27u);
}

TEST(RandomStream, StreamTagPacksPurposeAndMinor) {
  EXPECT_EQ(stream_tag(StreamPurpose::kShuffle, 5), 0x02000005u);
  EXPECT_EQ(stream_tag(StreamPurpose::kAugment, 0x1234567u), 0x01234567u);
}

TEST(RandomStream, UniformRangesAndMoments) {
  RandomStream r(7, stream_tag(StreamPurpose::kTest), 0);
  constexpr int kN = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / kN;
  EXPECT_NEAR(mean, 0.5, 0.005);
  EXPECT_NEAR(sum_sq / kN - mean * mean, 1.0 / 12.0, 0.002);
}

TEST(RandomStream, OpenUniformNeverHitsEndpoints) {
  RandomStream r(8, stream_tag(StreamPurpose::kTest), 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStream, SymmetricZeroMagnitudeIsExactlyZero) {
  RandomStream r(9, stream_tag(StreamPurpose::kTest), 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(r.symmetric(0.0), 0.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = r.symmetric(2.5);
    ASSERT_LE(std::abs(v), 2.5);
  }
}

TEST(RandomStream, NormalMoments) {
  RandomStream r(10, stream_tag(StreamPurpose::kTest), 0);
  constexpr int kN = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double z = r.normal();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(sum / kN, 0.0, 0.01);
  EXPECT_NEAR(sum_sq / kN, 1.0, 0.02);
}

TEST(RandomStream, BelowIsUnbiasedAndInRange) {
  RandomStream r(11, stream_tag(StreamPurpose::kTest), 0);
  std::vector<int> counts(7, 0);
  constexpr int kN = 70000;
  for (int i = 0; i < kN; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, kN / 7, 400);
}

TEST(RandomStream, BernoulliExtremes) {
  RandomStream r(12, stream_tag(StreamPurpose::kTest), 0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_FALSE(r.bernoulli(0.0));
    EXPECT_TRUE(r.bernoulli(1.0));
  }
}

TEST(RandomStream, ShuffleIsAPermutationAndDeterministic) {
  std::vector<int> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  b = a;
  RandomStream ra(13, stream_tag(StreamPurpose::kShuffle, 0), 0);
  RandomStream rb(13, stream_tag(StreamPurpose::kShuffle, 0), 0);
  ra.shuffle(std::span<int>(a));
  rb.shuffle(std::span<int>(b));
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(sorted, expected);
  EXPECT_NE(a, expected);
}

}  // namespace
}  // namespace glomnet
