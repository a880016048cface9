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

#include "dphist/continual_counter.h"

#include <bit>
#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "tests/test_util.h"

namespace dphist {
namespace {

using ::dphist::testing::StatusIs;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

Label L(const std::string& s) { return *Label::Create(s); }

StreamEvent Event(int64_t round, std::vector<std::string> labels) {
  StreamEvent event;
  event.round = round;
  for (const std::string& s : labels) event.items.push_back(L(s));
  return event;
}

ContinualCounter MakeCounter(int64_t horizon, int64_t l0, uint64_t seed,
                             std::optional<double> sigma = std::nullopt,
                             std::optional<double> threshold = std::nullopt) {
  CounterConfig config = *CounterConfig::Create(horizon, l0, 1.0, 0.01, seed);
  if (sigma.has_value()) config.sigma = *sigma;
  if (threshold.has_value()) config.threshold = *threshold;
  return *ContinualCounter::Create(config);
}

TEST(TreeDepthTest, BitWidth) {
  EXPECT_EQ(TreeDepth(1), 1);
  EXPECT_EQ(TreeDepth(7), 3);
  EXPECT_EQ(TreeDepth(8), 4);
  EXPECT_EQ(TreeDepth(1024), 11);
}

TEST(ActiveNodeCountTest, Examples) {
  EXPECT_EQ(ActiveNodeCount(8), 1);
  EXPECT_EQ(ActiveNodeCount(10), 2);
  EXPECT_EQ(ActiveNodeCount(7), 3);
  for (int64_t r = 1; r <= 4096; ++r) {
    ASSERT_EQ(ActiveNodeCount(r), std::popcount(static_cast<uint64_t>(r)));
  }
}

TEST(CounterConfigTest, Examples) {
  ASSERT_OK_AND_ASSIGN(CounterConfig config,
                       CounterConfig::Create(7, 1, 1.0, 0.07, 0));
  EXPECT_NEAR(config.threshold, 5.6526957480816822018, 1e-9);
  EXPECT_EQ(config.sigma, 1.0);
  ASSERT_OK_AND_ASSIGN(CdpBudget budget, CounterBudget(7, 1, 1.0, 0.07));
  EXPECT_EQ(budget, (CdpBudget{0.07, 1.5}));

  ASSERT_OK_AND_ASSIGN(config, CounterConfig::Create(1, 1, 1.0, 0.5, 0));
  EXPECT_NEAR(config.threshold, 1.0, 1e-12);
  ASSERT_OK_AND_ASSIGN(budget, CounterBudget(1, 1, 1.0, 0.5));
  EXPECT_EQ(budget, (CdpBudget{0.5, 0.5}));

  ASSERT_OK_AND_ASSIGN(budget, CounterBudget(1024, 2, 0.5, 1e-6));
  EXPECT_DOUBLE_EQ(budget.rho, 2.75);
}

TEST(CounterConfigTest, RejectsBadParameters) {
  EXPECT_THAT(CounterConfig::Create(0, 1, 1.0, 0.1, 0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(CounterConfig::Create(4, 0, 1.0, 0.1, 0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(CounterConfig::Create(4, 1, 0.0, 0.1, 0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(CounterConfig::Create(4, 1, 1.0, 1.0, 0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  CounterConfig config = *CounterConfig::Create(4, 1, 1.0, 0.1, 0);
  config.sigma = -1.0;
  EXPECT_THAT(ContinualCounter::Create(config),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ContinualCounterTest, ActiveNodesFollowBinaryDigits) {
  ContinualCounter counter = MakeCounter(16, 1, 1);
  for (int64_t r = 1; r <= 10; ++r) ASSERT_OK(counter.Observe(Event(r, {"a"})));
  std::vector<PartialSumNode> nodes = counter.ActiveNodes(L("a"));
  // 10 = 8 + 2: the p-sums [1, 8] and [9, 10].
  ASSERT_EQ(nodes.size(), 2u);
  EXPECT_EQ(nodes[0].level, 3);
  EXPECT_EQ(nodes[0].index, 0);
  EXPECT_EQ(nodes[0].partial_sum, 8);
  EXPECT_EQ(nodes[1].level, 1);
  EXPECT_EQ(nodes[1].index, 4);
  EXPECT_EQ(nodes[1].partial_sum, 2);
}

TEST(ContinualCounterTest, RoundEightUsesOneNode) {
  ContinualCounter counter = MakeCounter(8, 1, 1);
  for (int64_t r = 1; r <= 8; ++r) ASSERT_OK(counter.Observe(Event(r, {"a"})));
  const std::vector<PartialSumNode> nodes = counter.ActiveNodes(L("a"));
  ASSERT_EQ(nodes.size(), 1u);
  EXPECT_EQ(nodes[0].level, 3);
  EXPECT_EQ(nodes[0].partial_sum, 8);
}

TEST(ContinualCounterTest, ActiveNodeCountMatchesPopcountEveryRound) {
  ContinualCounter counter = MakeCounter(64, 1, 2);
  for (int64_t r = 1; r <= 64; ++r) {
    ASSERT_OK(counter.Observe(Event(r, r % 3 == 0 ? std::vector<std::string>{}
                                                  : std::vector<std::string>{
                                                        "a"})));
    EXPECT_EQ(static_cast<int>(counter.ActiveNodes(L("a")).size()),
              ActiveNodeCount(r));
  }
}

TEST(ContinualCounterTest, ZeroNoiseReleasesTruePrefixCounts) {
  ContinualCounter counter = MakeCounter(8, 2, 3, 0.0, 1.0);
  std::vector<std::vector<std::string>> rounds = {
      {"a"}, {"a", "b"}, {"a"}, {"a"}, {"a"}, {"b"}, {}, {"c"}};
  std::map<std::string, int64_t> truth;
  for (int64_t r = 1; r <= 8; ++r) {
    for (const std::string& s : rounds[r - 1]) ++truth[s];
    ASSERT_OK_AND_ASSIGN(const Snapshot snapshot,
                         counter.Observe(Event(r, rounds[r - 1])));
    std::vector<NoisyCount> expected;
    for (const auto& [label, count] : truth) {
      if (count > 1) expected.push_back({L(label), static_cast<double>(count)});
    }
    EXPECT_EQ(snapshot.items, expected) << "round " << r;
    if (r == 5) {
      EXPECT_THAT(snapshot.items,
                  ElementsAre(NoisyCount{L("a"), 5.0}));
    }
  }
}

TEST(ContinualCounterTest, ClosedNoiseIsReused) {
  ContinualCounter counter = MakeCounter(16, 1, 4);
  for (int64_t r = 1; r <= 4; ++r) ASSERT_OK(counter.Observe(Event(r, {"a"})));
  const double level2_noise = counter.ActiveNodes(L("a"))[0].noise;
  for (int64_t r = 5; r <= 7; ++r) {
    ASSERT_OK(counter.Observe(Event(r, {})));
    const std::vector<PartialSumNode> nodes = counter.ActiveNodes(L("a"));
    ASSERT_EQ(nodes[0].level, 2);
    EXPECT_EQ(nodes[0].noise, level2_noise) << "round " << r;
  }
}

TEST(ContinualCounterTest, LateDebutGetsNoiseForEveryClosedNode) {
  ContinualCounter counter = MakeCounter(8, 1, 5);
  for (int64_t r = 1; r <= 5; ++r) ASSERT_OK(counter.Observe(Event(r, {"z"})));
  ASSERT_OK(counter.Observe(Event(6, {"a"})));
  ASSERT_OK(counter.Observe(Event(7, {})));
  const std::vector<PartialSumNode> nodes = counter.ActiveNodes(L("a"));
  ASSERT_EQ(nodes.size(), 3u);
  EXPECT_EQ(nodes[0].partial_sum, 0);  // [1, 4]
  EXPECT_EQ(nodes[1].partial_sum, 1);  // [5, 6]
  EXPECT_EQ(nodes[2].partial_sum, 0);  // [7, 7]
  for (const PartialSumNode& node : nodes) EXPECT_NE(node.noise, 0.0);
  double sum = 0.0;
  for (const PartialSumNode& node : nodes) sum += node.partial_sum + node.noise;
  EXPECT_DOUBLE_EQ(*counter.NoisyCount(L("a")), sum);
}

TEST(ContinualCounterTest, LabelNoiseIndependentOfOtherLabels) {
  ContinualCounter alone = MakeCounter(8, 2, 6);
  ContinualCounter crowded = MakeCounter(8, 2, 6);
  for (int64_t r = 1; r <= 8; ++r) {
    ASSERT_OK(alone.Observe(Event(r, {"a"})));
    ASSERT_OK(crowded.Observe(Event(r, {"a", r % 2 ? "b" : "c"})));
    EXPECT_EQ(*alone.NoisyCount(L("a")), *crowded.NoisyCount(L("a")));
  }
}

TEST(ContinualCounterTest, NoisyPrefixIsUnbiasedWithPopcountVariance) {
  constexpr int kRuns = 20000;
  constexpr int64_t kHorizon = 16;
  const double sigma = 1.5;
  std::vector<double> sum(kHorizon + 1, 0.0);
  std::vector<double> sum_sq(kHorizon + 1, 0.0);
  for (int run = 0; run < kRuns; ++run) {
    ContinualCounter counter = MakeCounter(kHorizon, 1, 1000 + run, sigma);
    for (int64_t r = 1; r <= kHorizon; ++r) {
      ASSERT_OK(counter.Observe(Event(r, {"a"})));
      const double error = *counter.NoisyCount(L("a")) - static_cast<double>(r);
      sum[r] += error;
      sum_sq[r] += error * error;
    }
  }
  for (int64_t r = 1; r <= kHorizon; ++r) {
    const double variance = ActiveNodeCount(r) * sigma * sigma;
    const double mean = sum[r] / kRuns;
    const double var = sum_sq[r] / kRuns;
    EXPECT_NEAR(mean, 0.0, 5 * std::sqrt(variance / kRuns)) << r;
    EXPECT_NEAR(var, variance, 5 * variance * std::sqrt(2.0 / kRuns)) << r;
  }
}

TEST(ContinualCounterTest, RejectionsLeaveStateUntouched) {
  ContinualCounter counter = MakeCounter(3, 2, 7);
  ASSERT_OK(counter.Observe(Event(1, {"a"})));
  const nlohmann::json before = counter.DumpState();

  EXPECT_THAT(counter.Observe(Event(3, {"a"})),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("Expected round 2")));
  EXPECT_THAT(counter.Observe(Event(1, {"a"})),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(counter.Observe(Event(2, {"a", "b", "c"})),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("l0")));
  EXPECT_THAT(counter.Observe(Event(2, {"b", "b"})),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("repeats")));
  EXPECT_EQ(counter.DumpState(), before);
  EXPECT_EQ(counter.round(), 1);

  ASSERT_OK(counter.Observe(Event(2, {"b"})));
  ASSERT_OK(counter.Observe(Event(3, {})));
  const nlohmann::json full = counter.DumpState();
  EXPECT_THAT(counter.Observe(Event(4, {"a"})),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("horizon")));
  EXPECT_EQ(counter.DumpState(), full);
}

TEST(ContinualCounterTest, DumpStateDescribesEveryLabel) {
  ContinualCounter counter = MakeCounter(4, 1, 8);
  ASSERT_OK(counter.Observe(Event(1, {"a"})));
  ASSERT_OK(counter.Observe(Event(2, {"b"})));
  const nlohmann::json state = counter.DumpState();
  EXPECT_EQ(state["round"], 2);
  EXPECT_EQ(state["depth"], 3);
  EXPECT_EQ(state["config"]["seed"], 8);
  ASSERT_EQ(state["labels"].size(), 2u);
  EXPECT_EQ(state["labels"][0]["label"], "a");
  EXPECT_EQ(state["labels"][1]["first_round"], 2);
  EXPECT_EQ(state["labels"][0]["levels"].size(), 3u);
  // [1, 2] closed at round 2 and holds a's single event.
  EXPECT_EQ(state["labels"][0]["levels"][1]["closed_sum"], 1);
  EXPECT_EQ(state["budget"]["rho"], counter.budget().rho);
}

TEST(ContinualCounterTest, SameSeedSameSnapshots) {
  ContinualCounter x = MakeCounter(8, 1, 9);
  ContinualCounter y = MakeCounter(8, 1, 9);
  for (int64_t r = 1; r <= 8; ++r) {
    ASSERT_OK_AND_ASSIGN(const Snapshot a, x.Observe(Event(r, {"a"})));
    ASSERT_OK_AND_ASSIGN(const Snapshot b, y.Observe(Event(r, {"a"})));
    EXPECT_EQ(a, b);
  }
}

}  // namespace
}  // namespace dphist
