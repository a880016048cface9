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

// File formats: histogram CSV, canonical JSON reports, and JSON-lines stream
// events.

#ifndef DPHIST_IO_H_
#define DPHIST_IO_H_

#include <cstdint>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dphist/continual_counter.h"
#include "dphist/gumbel_topk.h"
#include "dphist/release_report.h"
#include "dphist/types.h"
#include "json.hpp"

namespace dphist {

// I/O failures come back as kUnavailable with the path and OS error; content
// errors are kInvalidArgument.
absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view content);

// Parses "label,count" CSV: the exact header, then one record per line. Empty
// lines and trailing '\r' are ignored. Errors name the 1-based line.
absl::StatusOr<Histogram> ParseHistogramCsv(absl::string_view content);
absl::StatusOr<Histogram> ReadHistogramCsv(const std::string& path);
// Inverse of ParseHistogramCsv. Labels containing ',' or a newline cannot be
// represented and are rejected.
absl::StatusOr<std::string> FormatHistogramCsv(const Histogram& histogram);

// Sorted keys, doubles with 17 significant digits, integers verbatim. With
// `indent` < 0 the output is a single line.
std::string CanonicalJson(const nlohmann::json& value, int indent = 2);

enum class ItemOrder { kLabel, kCount };

struct DisplayOptions {
  // Decimal places kept in reported noisy counts.
  std::optional<int> round_digits;
  ItemOrder order = ItemOrder::kLabel;
};

// {mechanism, params, seed, threshold_public, budget, items:[{label,
// noisy_count}]}.
nlohmann::json ReportToJson(const ReleaseReport& report,
                            const nlohmann::json& params,
                            const DisplayOptions& display = {});
// Same schema; items are [{rank, label}]. The terminating sentinel is not
// listed; "terminated" records whether the list ended early.
nlohmann::json GumbelReportToJson(const GumbelTopKResult& result,
                                  const nlohmann::json& params);
// {round, items:[{label, noisy_count}]}.
nlohmann::json SnapshotToJson(const Snapshot& snapshot,
                              const DisplayOptions& display = {});

// One JSON object per line: {"round": r, "items": ["a", "b"]}.
absl::StatusOr<StreamEvent> ParseStreamEvent(absl::string_view line,
                                             int64_t line_number);

}  // namespace dphist

#endif  // DPHIST_IO_H_
