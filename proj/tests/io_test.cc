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

#include "dphist/io.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "tests/test_util.h"

namespace dphist {
namespace {

using ::dphist::testing::StatusIs;
using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::Pair;

Label L(const std::string& s) { return *Label::Create(s); }

std::string TempPath(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) /
          ("dphist_io_" + name))
      .string();
}

TEST(ParseHistogramCsvTest, ParsesRecords) {
  ASSERT_OK_AND_ASSIGN(const Histogram h,
                       ParseHistogramCsv("label,count\na,3\nb,1\n"));
  EXPECT_THAT(h.entries(), ElementsAre(Pair(L("a"), 3), Pair(L("b"), 1)));
}

TEST(ParseHistogramCsvTest, ToleratesCrlfBlankLinesAndNoTrailingNewline) {
  ASSERT_OK_AND_ASSIGN(const Histogram h,
                       ParseHistogramCsv("label,count\r\n\r\nx y,0\r\nz,12"));
  EXPECT_THAT(h.entries(), ElementsAre(Pair(L("x y"), 0), Pair(L("z"), 12)));
}

TEST(ParseHistogramCsvTest, HeaderOnlyIsEmpty) {
  ASSERT_OK_AND_ASSIGN(const Histogram h, ParseHistogramCsv("label,count\n"));
  EXPECT_TRUE(h.empty());
}

TEST(ParseHistogramCsvTest, DuplicateNamesLine) {
  EXPECT_THAT(ParseHistogramCsv("label,count\na,3\na,1\n"),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("Line 3: duplicate label")));
}

TEST(ParseHistogramCsvTest, ReservedLabelRejected) {
  EXPECT_THAT(ParseHistogramCsv("label,count\n\xE2\x8A\xA5" "1,5\n"),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("Line 2")));
}

TEST(ParseHistogramCsvTest, MalformedLines) {
  struct Case {
    const char* content;
    const char* message;
  };
  for (const Case& c : {
           Case{"", "Missing header"},
           Case{"name,count\na,1\n", "Line 1: expected header"},
           Case{"label,count\na\n", "Line 2: expected 2 fields"},
           Case{"label,count\na,1,2\n", "Line 2: expected 2 fields"},
           Case{"label,count\na,-1\n", "Line 2: count '-1'"},
           Case{"label,count\na,1.5\n", "not a non-negative integer"},
           Case{"label,count\na, 1\n", "Line 2"},
           Case{"label,count\nb,2\na,\n", "Line 3"},
           Case{"label,count\nb,99999999999999999999\n", "Line 2"},
           Case{"label,count\n,4\n", "Line 2"},
       }) {
    EXPECT_THAT(ParseHistogramCsv(c.content),
                StatusIs(absl::StatusCode::kInvalidArgument,
                         HasSubstr(c.message)))
        << c.content;
  }
}

TEST(HistogramCsvTest, RoundTrip) {
  ASSERT_OK_AND_ASSIGN(
      const Histogram h,
      Histogram::FromPairs({{"alpha", 3}, {"b\xC3\xA9ta", 0}, {"z", 1000000}}));
  ASSERT_OK_AND_ASSIGN(const std::string csv, FormatHistogramCsv(h));
  EXPECT_EQ(csv, "label,count\nalpha,3\nb\xC3\xA9ta,0\nz,1000000\n");
  ASSERT_OK_AND_ASSIGN(const Histogram back, ParseHistogramCsv(csv));
  EXPECT_EQ(back, h);
}

TEST(HistogramCsvTest, UnrepresentableLabel) {
  ASSERT_OK_AND_ASSIGN(const Histogram h, Histogram::FromPairs({{"a,b", 1}}));
  EXPECT_THAT(FormatHistogramCsv(h),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(FileTest, WriteReadAndMissingFile) {
  const std::string path = TempPath("roundtrip.csv");
  ASSERT_OK(WriteFile(path, "label,count\nq,4\n"));
  ASSERT_OK_AND_ASSIGN(const Histogram h, ReadHistogramCsv(path));
  EXPECT_THAT(h.entries(), ElementsAre(Pair(L("q"), 4)));

  EXPECT_THAT(ReadFile(TempPath("does_not_exist.csv")),
              StatusIs(absl::StatusCode::kUnavailable,
                       HasSubstr("does_not_exist.csv")));
  EXPECT_THAT(WriteFile(TempPath("no_such_dir/out.json"), "x"),
              StatusIs(absl::StatusCode::kUnavailable, HasSubstr("no_such_dir")));
}

TEST(FileTest, ParseErrorsNameThePath) {
  const std::string path = TempPath("bad.csv");
  ASSERT_OK(WriteFile(path, "label,count\na,x\n"));
  EXPECT_THAT(ReadHistogramCsv(path),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("bad.csv: Line 2")));
}

TEST(CanonicalJsonTest, SortedKeysAndFullPrecision) {
  const nlohmann::json value = {{"zeta", 0.1}, {"alpha", {1, 2}}, {"mid", "s"}};
  EXPECT_EQ(CanonicalJson(value),
            "{\n  \"alpha\": [\n    1,\n    2\n  ],\n  \"mid\": \"s\",\n"
            "  \"zeta\": 0.10000000000000001\n}");
  EXPECT_EQ(CanonicalJson(value, -1),
            "{\"alpha\":[1,2],\"mid\":\"s\",\"zeta\":0.10000000000000001}");
}

TEST(CanonicalJsonTest, DoublesRoundTripExactly) {
  for (double v : {1.0 / 3.0, 5.7534243088228996, 1e-300, -2.5e17}) {
    const std::string text = CanonicalJson(nlohmann::json(v));
    EXPECT_EQ(nlohmann::json::parse(text).get<double>(), v) << text;
  }
  EXPECT_EQ(CanonicalJson(nlohmann::json(std::numeric_limits<double>::infinity())),
            "null");
  EXPECT_EQ(CanonicalJson(nlohmann::json::object()), "{}");
  EXPECT_EQ(CanonicalJson(nlohmann::json::array()), "[]");
}

ReleaseReport SampleReport() {
  ReleaseReport report;
  report.mechanism = kMechanismUnknownDomainGaussian;
  report.threshold = 5.75;
  report.budget = {1e-6, 0.5};
  report.seed = 7;
  report.items = {{L("a"), 10.123456}, {L("b"), 20.5}};
  return report;
}

TEST(ReportToJsonTest, Schema) {
  const nlohmann::json j =
      ReportToJson(SampleReport(), nlohmann::json{{"epsilon", 1.0}});
  EXPECT_EQ(j["mechanism"], "unknown_domain_gaussian");
  EXPECT_EQ(j["params"]["epsilon"], 1.0);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["threshold_public"], 5.75);
  EXPECT_EQ(j["budget"], (nlohmann::json{{"delta", 1e-6}, {"rho", 0.5}}));
  ASSERT_EQ(j["items"].size(), 2u);
  EXPECT_EQ(j["items"][0], (nlohmann::json{{"label", "a"},
                                           {"noisy_count", 10.123456}}));
}

TEST(ReportToJsonTest, EmptyItemsArePresent) {
  ReleaseReport report = SampleReport();
  report.items.clear();
  const std::string text = CanonicalJson(ReportToJson(report, {}));
  EXPECT_THAT(text, HasSubstr("\"items\": []"));
}

TEST(ReportToJsonTest, RoundingAndCountOrder) {
  DisplayOptions display;
  display.round_digits = 2;
  display.order = ItemOrder::kCount;
  const nlohmann::json j = ReportToJson(SampleReport(), {}, display);
  EXPECT_EQ(j["items"][0]["label"], "b");
  EXPECT_EQ(j["items"][1]["noisy_count"], 10.12);
}

TEST(GumbelReportToJsonTest, RanksWithoutCounts) {
  GumbelTopKResult result;
  result.ranking.items = {L("q"), L("p"), Label::Sentinel()};
  result.threshold = 3.99;
  result.budget = {0.05, 0.375};
  const nlohmann::json j = GumbelReportToJson(result, {{"k", 3}});
  EXPECT_EQ(j["mechanism"], "gumbel_topk");
  EXPECT_EQ(j["items"], (nlohmann::json{{{"rank", 1}, {"label", "q"}},
                                        {{"rank", 2}, {"label", "p"}}}));
  EXPECT_EQ(j["terminated"], true);
  for (const auto& item : j["items"]) EXPECT_FALSE(item.contains("noisy_count"));
}

TEST(SnapshotToJsonTest, Schema) {
  Snapshot snapshot;
  snapshot.round = 3;
  snapshot.items = {{L("a"), 4.5}};
  EXPECT_EQ(CanonicalJson(SnapshotToJson(snapshot), -1),
            "{\"items\":[{\"label\":\"a\",\"noisy_count\":4.5}],\"round\":3}");
  snapshot.items.clear();
  EXPECT_EQ(CanonicalJson(SnapshotToJson(snapshot), -1),
            "{\"items\":[],\"round\":3}");
}

TEST(ParseStreamEventTest, ParsesAndRejects) {
  ASSERT_OK_AND_ASSIGN(const StreamEvent event,
                       ParseStreamEvent(R"({"round": 2, "items": ["a", "b"]})",
                                        1));
  EXPECT_EQ(event.round, 2);
  EXPECT_THAT(event.items, ElementsAre(L("a"), L("b")));

  for (const char* bad : {"{", "[1]", R"({"items": []})",
                          R"({"round": 1.5, "items": []})",
                          R"({"round": 1, "items": "a"})",
                          R"({"round": 1, "items": [3]})",
                          R"({"round": 1, "items": [""]})"}) {
    EXPECT_THAT(ParseStreamEvent(bad, 7),
                StatusIs(absl::StatusCode::kInvalidArgument,
                         HasSubstr("Line 7")))
        << bad;
  }
}

}  // namespace
}  // namespace dphist
