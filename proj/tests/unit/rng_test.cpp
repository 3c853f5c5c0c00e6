/*
 * Copyright 2026 The selqa Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "selqa/nn/rng.hpp"

namespace selqa::nn {
namespace {

using Block = std::array<std::uint32_t, 4>;

// Known-answer vectors published with the Random123 reference code.
TEST(PhiloxTest, ZeroCounterZeroKey) {
  EXPECT_EQ(Philox4x32({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(PhiloxTest, AllOnes) {
  EXPECT_EQ(Philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(PhiloxTest, PiDigits) {
  EXPECT_EQ(Philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStreamTest, PureFunctionOfSeedStreamCounter) {
  RngStream a(7, 11);
  RngStream b(7, 11);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.NextU64(), b.NextU64());
  // Starting mid-sequence reproduces the tail.
  RngStream c(7, 11, 50);
  RngStream d(7, 11);
  for (int i = 0; i < 50; ++i) d.NextU64();
  for (int i = 0; i < 20; ++i) ASSERT_EQ(c.NextU64(), d.NextU64());
}

TEST(RngStreamTest, InterleavingDoesNotMatter) {
  RngStream a(3, 1), b(3, 2);
  std::vector<std::uint64_t> seq_a, seq_b;
  for (int i = 0; i < 10; ++i) seq_a.push_back(a.NextU64());
  for (int i = 0; i < 10; ++i) seq_b.push_back(b.NextU64());
  RngStream a2(3, 1), b2(3, 2);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(b2.NextU64(), seq_b[i]);
    EXPECT_EQ(a2.NextU64(), seq_a[i]);
  }
}

TEST(RngStreamTest, SplitIsDeterministicAndDistinct) {
  const RngStream root(5, 0);
  EXPECT_EQ(root.Split(1).stream_id(), root.Split(1).stream_id());
  std::set<std::uint64_t> ids;
  for (std::uint64_t t = 0; t < 1000; ++t) ids.insert(root.Split(t).stream_id());
  EXPECT_EQ(ids.size(), 1000u);
  // Split does not advance the parent.
  RngStream p(5, 0);
  const std::uint64_t before = p.counter();
  (void)p.Split(3);
  EXPECT_EQ(p.counter(), before);
  EXPECT_EQ(root.Split(2).counter(), 0u);
}

TEST(RngStreamTest, DifferentSeedsDiffer) {
  RngStream a(1, 0), b(2, 0);
  EXPECT_NE(a.NextU64(), b.NextU64());
}

TEST(RngStreamTest, UniformInUnitInterval) {
  RngStream r(9, 9);
  std::vector<double> v;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    v.push_back(u);
  }
  auto [mean, var] = oracle::MeanVariance(v);
  EXPECT_NEAR(mean, 0.5, 0.01);
  EXPECT_NEAR(var, 1.0 / 12.0, 0.005);
}

TEST(RngStreamTest, NormalMoments) {
  RngStream r(4, 2);
  std::vector<double> v;
  for (int i = 0; i < 100000; ++i) v.push_back(r.Normal());
  auto [mean, var] = oracle::MeanVariance(v);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.03);
}

TEST(RngStreamTest, UniformIndexCoversRangeEvenly) {
  RngStream r(1, 1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.UniformIndex(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(TagTest, StableFnv) {
  // FNV-1a of the empty string is the offset basis; of "a" a known constant.
  static_assert(Tag("") == 0xcbf29ce484222325ull);
  static_assert(Tag("a") == 0xaf63dc4c8601ec8cull);
  EXPECT_NE(Tag("init"), Tag("infer"));
}

}  // namespace
}  // namespace selqa::nn
