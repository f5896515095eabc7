// Copyright 2026 The PMPC Authors
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

#include <set>
#include <vector>

#include "pmpc/rng.hpp"

using pmpc::Philox4x32;
using pmpc::RngStream;

// Known-answer vectors published with Random123.
TEST(Philox, KnownAnswerZero)
{
  const auto out = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes)
{
  const auto out = Philox4x32::encrypt(
    {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi)
{
  const auto out = Philox4x32::encrypt(
    {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, SameSeedAndStreamGiveIdenticalSequences)
{
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
  }
  EXPECT_EQ(a.position(), 1000u);
}

TEST(RngStream, StreamsAndSeedsDiffer)
{
  RngStream a(42, 7);
  RngStream b(42, 8);
  RngStream c(43, 7);
  int equal_ab = 0;
  int equal_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    equal_ab += x == b.next_u64();
    equal_ac += x == c.next_u64();
  }
  EXPECT_EQ(equal_ab, 0);
  EXPECT_EQ(equal_ac, 0);
}

TEST(RngStream, FirstWordIsLowHalfOfFirstBlock)
{
  RngStream rng(0, 0);
  EXPECT_EQ(rng.next_u64(), 0xe169c58d6627e8d5ull);
  EXPECT_EQ(rng.next_u64(), 0x9b00dbd8bc57ac4cull);
}

TEST(RngStream, CopiesContinueIdentically)
{
  RngStream a(5, 1);
  a.next_u64();
  RngStream b = a;
  for (int i = 0; i < 10; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
  }
}

TEST(RngStream, UniformRanges)
{
  RngStream rng(1, 2);
  std::set<std::size_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto idx = rng.uniform_index(7);
    ASSERT_LT(idx, 7u);
    seen.insert(idx);
  }
  EXPECT_EQ(seen.size(), 7u);
}
