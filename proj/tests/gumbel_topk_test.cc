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

#include "dphist/gumbel_topk.h"

#include <cmath>
#include <limits>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "tests/test_util.h"

namespace dphist {
namespace {

using ::dphist::testing::StatusIs;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

constexpr int kTrials = 100000;

Histogram Hist(std::initializer_list<std::pair<std::string, int64_t>> pairs) {
  return *Histogram::FromPairs(pairs);
}

Label L(const std::string& s) { return *Label::Create(s); }

GumbelTopKOptions NoThreshold() {
  GumbelTopKOptions options;
  options.threshold_override = -std::numeric_limits<double>::infinity();
  return options;
}

TEST(GumbelThresholdTest, Example) {
  ASSERT_OK_AND_ASSIGN(const double t, GumbelThreshold(1, 1.0, 0.05));
  EXPECT_NEAR(t, 3.9957322735539909934, 1e-9);
}

TEST(GumbelThresholdTest, ScalesWithL0) {
  ASSERT_OK_AND_ASSIGN(const double one, GumbelThreshold(1, 0.5, 1e-3));
  ASSERT_OK_AND_ASSIGN(const double four, GumbelThreshold(4, 0.5, 1e-3));
  EXPECT_NEAR(four - one, std::log(4.0) / 0.5, 1e-12);
}

TEST(GumbelThresholdTest, RejectsBadParameters) {
  EXPECT_THAT(GumbelThreshold(0, 1.0, 0.05),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(GumbelThreshold(1, 0.0, 0.05),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(GumbelThreshold(1, 1.0, 0.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ReleaseGumbelTopKTest, EmptyHistogramTerminatesImmediately) {
  RandomSource rng(3);
  ASSERT_OK_AND_ASSIGN(const GumbelTopKResult result,
                       ReleaseGumbelTopK(Histogram(), 2, 3, 1, 1.0, 0.05, rng));
  EXPECT_THAT(result.ranking.items, ElementsAre(Label::Sentinel()));
  EXPECT_TRUE(result.ranking.terminated());
  EXPECT_EQ(result.budget, (CdpBudget{0.05, 2.0 / 8.0}));
  EXPECT_NEAR(result.threshold, 3.9957322735539909934, 1e-9);
  EXPECT_EQ(result.seed, 3u);
}

TEST(ReleaseGumbelTopKTest, EmptyHistogramWithoutThresholdStillTerminates) {
  // Zero-count padding never competes.
  RandomSource rng(3);
  ASSERT_OK_AND_ASSIGN(
      const GumbelTopKResult result,
      ReleaseGumbelTopK(Histogram(), 2, 2, 1, 1.0, 0.05, rng, NoThreshold()));
  EXPECT_THAT(result.ranking.items, ElementsAre(Label::Sentinel()));
}

TEST(ReleaseGumbelTopKTest, FullListHasNoSentinel) {
  RandomSource rng(4);
  ASSERT_OK_AND_ASSIGN(
      const GumbelTopKResult result,
      ReleaseGumbelTopK(Hist({{"a", 1000}, {"b", 900}, {"c", 800}, {"d", 1}}),
                        2, 3, 1, 1.0, 0.05, rng));
  EXPECT_THAT(result.ranking.items, ElementsAre(L("a"), L("b")));
  EXPECT_FALSE(result.ranking.terminated());
}

TEST(ReleaseGumbelTopKTest, ShortListEndsWithSentinel) {
  RandomSource rng(4);
  ASSERT_OK_AND_ASSIGN(
      const GumbelTopKResult result,
      ReleaseGumbelTopK(Hist({{"a", 1000}}), 3, 3, 1, 1.0, 0.05, rng));
  EXPECT_THAT(result.ranking.items, ElementsAre(L("a"), Label::Sentinel()));
  EXPECT_TRUE(result.ranking.terminated());
}

TEST(ReleaseGumbelTopKTest, RejectsKAboveKbar) {
  RandomSource rng(1);
  EXPECT_THAT(ReleaseGumbelTopK(Hist({{"a", 1}}), 3, 2, 1, 1.0, 0.05, rng),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("k must not exceed kbar")));
  EXPECT_THAT(ReleaseGumbelTopK(Hist({{"a", 1}}), 0, 2, 1, 1.0, 0.05, rng),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ReleaseGumbelTopK(Hist({{"a", 1}}), 1, 1, 1, 1.0, 1.5, rng),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ReleaseGumbelTopKTest, FirstPickFollowsSoftmax) {
  const Histogram h = Hist({{"a", 103}, {"b", 102}, {"c", 101}});
  RandomSource rng(8);
  int first_a = 0;
  int pair_ab = 0;
  for (int i = 0; i < kTrials; ++i) {
    const GumbelTopKResult result =
        *ReleaseGumbelTopK(h, 2, 3, 1, 1.0, 0.05, rng, NoThreshold());
    if (result.ranking.items[0] == L("a")) {
      ++first_a;
      if (result.ranking.items[1] == L("b")) ++pair_ab;
    }
  }
  const double p_a = 0.66524095577482188953;
  const double p_ab = 0.48633010757520722678;
  EXPECT_NEAR(static_cast<double>(first_a) / kTrials, p_a,
              5 * std::sqrt(p_a * (1 - p_a) / kTrials));
  EXPECT_NEAR(static_cast<double>(pair_ab) / kTrials, p_ab,
              5 * std::sqrt(p_ab * (1 - p_ab) / kTrials));
}

TEST(ReleaseGumbelTopKTest, RaisingACountNeverLowersItsRank) {
  // With the same seed the noise per position is shared, so a larger count
  // can only move its label up or keep it in place.
  auto rank_of_a = [](const GumbelTopKResult& r) {
    for (size_t i = 0; i < r.ranking.items.size(); ++i) {
      if (r.ranking.items[i] == L("a")) return static_cast<int>(i);
    }
    return 99;
  };
  const Histogram low = Hist({{"a", 6}, {"b", 5}, {"c", 4}});
  const Histogram high = Hist({{"a", 8}, {"b", 5}, {"c", 4}});
  for (uint64_t seed = 0; seed < 2000; ++seed) {
    RandomSource r1(seed);
    RandomSource r2(seed);
    ASSERT_OK_AND_ASSIGN(const GumbelTopKResult x,
                         ReleaseGumbelTopK(low, 3, 3, 1, 1.0, 0.3, r1));
    ASSERT_OK_AND_ASSIGN(const GumbelTopKResult y,
                         ReleaseGumbelTopK(high, 3, 3, 1, 1.0, 0.3, r2));
    EXPECT_LE(rank_of_a(y), rank_of_a(x)) << seed;
  }
}

TEST(ReleaseGumbelTopKTest, OnlyInputLabelsAppear) {
  const Histogram h = Hist({{"p", 3}, {"q", 2}, {"r", 1}});
  RandomSource rng(2);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_OK_AND_ASSIGN(const GumbelTopKResult result,
                         ReleaseGumbelTopK(h, 3, 3, 1, 1.0, 0.5, rng));
    for (size_t j = 0; j < result.ranking.items.size(); ++j) {
      const Label& label = result.ranking.items[j];
      if (label.is_sentinel()) {
        EXPECT_EQ(j + 1, result.ranking.items.size());
        EXPECT_EQ(label, Label::Sentinel());
      } else {
        EXPECT_TRUE(h.contains(label));
      }
    }
  }
}

}  // namespace
}  // namespace dphist
