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

#include "dphist/validation_suites.h"

#include <string>

#include "dphist/validation_harness.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "tests/test_util.h"

namespace dphist {
namespace {

using ::dphist::testing::StatusIs;

class SuiteTest : public ::testing::TestWithParam<std::string> {};

TEST_P(SuiteTest, PassesAtMinimumTrials) {
  SuiteOptions options;
  options.trials = kMinDeltaTrials;
  options.seed = 11;
  ASSERT_OK_AND_ASSIGN(const nlohmann::json report,
                       RunValidationSuite(GetParam(), options));
  EXPECT_EQ(report["suite"], GetParam());
  EXPECT_EQ(report["trials"], kMinDeltaTrials);
  ASSERT_FALSE(report["checks"].empty());
  for (const nlohmann::json& check : report["checks"]) {
    EXPECT_TRUE(check["pass"].get<bool>()) << check.dump();
  }
  EXPECT_TRUE(report["pass"].get<bool>());
}

INSTANTIATE_TEST_SUITE_P(AllSuites, SuiteTest,
                         ::testing::Values("alg1", "topk", "gumbel", "stream",
                                           "renyi"));

TEST(RunValidationSuiteTest, DeterministicAndThreadIndependent) {
  SuiteOptions options;
  options.trials = kMinDeltaTrials;
  options.seed = 5;
  ASSERT_OK_AND_ASSIGN(const nlohmann::json first,
                       RunValidationSuite("alg1", options));
  options.threads = 3;
  ASSERT_OK_AND_ASSIGN(const nlohmann::json second,
                       RunValidationSuite("alg1", options));
  EXPECT_EQ(first, second);
}

TEST(RunValidationSuiteTest, RejectsBadArguments) {
  SuiteOptions options;
  options.trials = kMinDeltaTrials - 1;
  EXPECT_THAT(RunValidationSuite("alg1", options),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(RunValidationSuite("sparse", SuiteOptions{}),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(GumbelEquivalenceCorpusTest, TwentySmallInstances) {
  const std::vector<TopKInstance> corpus = GumbelEquivalenceCorpus();
  ASSERT_EQ(corpus.size(), 20u);
  for (const TopKInstance& instance : corpus) {
    EXPECT_LE(instance.histogram.size(), 5u);
    EXPECT_GE(instance.k, 1);
    EXPECT_LE(instance.k, 3);
    EXPECT_LE(instance.k, static_cast<int64_t>(instance.histogram.size()));
    EXPECT_GT(instance.epsilon, 0.0);
  }
}

TEST(GumbelTvToleranceTest, Scaling) {
  EXPECT_EQ(GumbelTvTolerance(1000000), 0.01);
  EXPECT_EQ(GumbelTvTolerance(4000000), 0.01);
  EXPECT_NEAR(GumbelTvTolerance(250000), 0.02, 1e-15);
}

}  // namespace
}  // namespace dphist
