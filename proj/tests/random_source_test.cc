//
// Copyright 2026 The dphist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dphist/random_source.h"

#include <random>
#include <set>

#include "gtest/gtest.h"

namespace dphist {
namespace {

TEST(RandomSourceTest, SameSeedSameSequence) {
  RandomSource a(42);
  RandomSource b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextBits(), b.NextBits());
}

TEST(RandomSourceTest, MatchesStandardEngine) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  RandomSource source(std::mt19937_64::default_seed);
  for (int i = 0; i < 9999; ++i) source.NextBits();
  EXPECT_EQ(source.NextBits(), 9981545732273789042ull);
}

TEST(RandomSourceTest, UniformStaysInOpenInterval) {
  RandomSource source(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = source.Uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomSourceTest, UniformLatticeEndpoints) {
  // The smallest and largest reachable values are half a step from 0 and 1.
  EXPECT_EQ((0.0 + 0.5) * 0x1.0p-52, 0x1.0p-53);
  EXPECT_EQ((static_cast<double>((~uint64_t{0}) >> 12) + 0.5) * 0x1.0p-52,
            1.0 - 0x1.0p-53);
}

TEST(RandomSourceTest, ChildrenDependOnlyOnSeed) {
  RandomSource parent(9);
  RandomSource before = parent.Child(3);
  parent.NextBits();
  RandomSource after = parent.Child(3);
  EXPECT_EQ(before.seed(), after.seed());
  EXPECT_EQ(before.NextBits(), after.NextBits());
}

TEST(RandomSourceTest, ChildrenAreDistinct) {
  RandomSource parent(1);
  std::set<uint64_t> seeds;
  for (uint64_t s = 0; s < 1000; ++s) seeds.insert(parent.Child(s).seed());
  seeds.insert(parent.Child("a").seed());
  seeds.insert(parent.Child("b").seed());
  seeds.insert(parent.Child("ab").seed());
  EXPECT_EQ(seeds.size(), 1003u);
  EXPECT_NE(RandomSource(1).Child("a").seed(), RandomSource(2).Child("a").seed());
}

TEST(RandomSourceTest, DeriveSeedIsPure) {
  EXPECT_EQ(DeriveSeed(5, 7), DeriveSeed(5, 7));
  EXPECT_EQ(DeriveSeed(5, "label"), DeriveSeed(5, "label"));
  EXPECT_NE(DeriveSeed(5, 7), DeriveSeed(7, 5));
  EXPECT_NE(MixSeed(0), MixSeed(1));
}

}  // namespace
}  // namespace dphist
