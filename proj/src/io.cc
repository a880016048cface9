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

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "dphist/internal/status_macros.h"

namespace dphist {
namespace {

using nlohmann::json;

std::string FormatDouble(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void AppendJson(const json& value, int indent, int depth, std::string& out) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out.push_back('\n');
    out.append(static_cast<size_t>(indent * d), ' ');
  };
  switch (value.type()) {
    case json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      // nlohmann::json objects are std::map-backed, so iteration is sorted.
      out.push_back('{');
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += pretty ? ": " : ":";
        AppendJson(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      bool first = true;
      for (const json& item : value) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        AppendJson(item, indent, depth + 1, out);
      }
      newline(depth);
      out.push_back(']');
      return;
    }
    case json::value_t::number_float:
      out += FormatDouble(value.get<double>());
      return;
    default:
      out += value.dump();
      return;
  }
}

double Rounded(double v, const DisplayOptions& display) {
  if (!display.round_digits.has_value()) return v;
  const double scale = std::pow(10.0, *display.round_digits);
  return std::round(v * scale) / scale;
}

json ItemsToJson(std::vector<NoisyCount> items, const DisplayOptions& display) {
  if (display.order == ItemOrder::kCount) {
    std::stable_sort(items.begin(), items.end(),
                     [](const NoisyCount& a, const NoisyCount& b) {
                       return a.noisy_count > b.noisy_count;
                     });
  }
  json out = json::array();
  for (const NoisyCount& item : items) {
    out.push_back({{"label", item.label.value()},
                   {"noisy_count", Rounded(item.noisy_count, display)}});
  }
  return out;
}

absl::StatusOr<int64_t> ParseCount(absl::string_view text, int64_t line) {
  const bool digits =
      !text.empty() && std::all_of(text.begin(), text.end(), [](char c) {
        return absl::ascii_isdigit(static_cast<unsigned char>(c));
      });
  int64_t count = 0;
  if (!digits || !absl::SimpleAtoi(text, &count)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Line ", line, ": count '", text,
                     "' is not a non-negative integer."));
  }
  return count;
}

}  // namespace

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::UnavailableError(absl::StrCat("Cannot open '", path,
                                               "' for reading: ",
                                               std::strerror(errno)));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    return absl::UnavailableError(absl::StrCat("Cannot read '", path, "': ",
                                               std::strerror(errno)));
  }
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(absl::StrCat("Cannot open '", path,
                                               "' for writing: ",
                                               std::strerror(errno)));
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    return absl::UnavailableError(absl::StrCat("Cannot write '", path, "': ",
                                               std::strerror(errno)));
  }
  return absl::OkStatus();
}

absl::StatusOr<Histogram> ParseHistogramCsv(absl::string_view content) {
  std::vector<absl::string_view> lines = absl::StrSplit(content, '\n');
  Histogram histogram;
  bool saw_header = false;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int64_t line_number = static_cast<int64_t>(i) + 1;
    absl::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "label,count") {
        return absl::InvalidArgumentError(absl::StrCat(
            "Line ", line_number, ": expected header 'label,count'."));
      }
      saw_header = true;
      continue;
    }
    const std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (fields.size() != 2) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Line ", line_number, ": expected 2 fields, got ", fields.size(),
          "."));
    }
    absl::StatusOr<Label> label = Label::Create(std::string(fields[0]));
    if (!label.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Line ", line_number, ": ", label.status().message()));
    }
    DPHIST_ASSIGN_OR_RETURN(const int64_t count,
                            ParseCount(fields[1], line_number));
    if (histogram.contains(*label)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Line ", line_number, ": duplicate label '", fields[0], "'."));
    }
    DPHIST_RETURN_IF_ERROR(histogram.Insert(*std::move(label), count));
  }
  if (!saw_header) {
    return absl::InvalidArgumentError(
        "Missing header 'label,count' in histogram CSV.");
  }
  return histogram;
}

absl::StatusOr<Histogram> ReadHistogramCsv(const std::string& path) {
  DPHIST_ASSIGN_OR_RETURN(const std::string content, ReadFile(path));
  absl::StatusOr<Histogram> histogram = ParseHistogramCsv(content);
  if (!histogram.ok()) {
    return absl::Status(histogram.status().code(),
                        absl::StrCat(path, ": ", histogram.status().message()));
  }
  return histogram;
}

absl::StatusOr<std::string> FormatHistogramCsv(const Histogram& histogram) {
  std::string out = "label,count\n";
  for (const auto& [label, count] : histogram) {
    if (label.value().find_first_of(",\r\n") != std::string::npos) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Label '", label.value(), "' cannot be written as CSV."));
    }
    absl::StrAppend(&out, label.value(), ",", count, "\n");
  }
  return out;
}

std::string CanonicalJson(const json& value, int indent) {
  std::string out;
  AppendJson(value, indent, 0, out);
  return out;
}

json ReportToJson(const ReleaseReport& report, const json& params,
                  const DisplayOptions& display) {
  return {{"mechanism", report.mechanism},
          {"params", params},
          {"seed", report.seed},
          {"threshold_public", report.threshold},
          {"budget", ToJson(report.budget)},
          {"items", ItemsToJson(report.items, display)}};
}

json GumbelReportToJson(const GumbelTopKResult& result, const json& params) {
  json items = json::array();
  int64_t rank = 1;
  for (const Label& label : result.ranking.items) {
    if (label.is_sentinel()) break;
    items.push_back({{"rank", rank++}, {"label", label.value()}});
  }
  return {{"mechanism", kMechanismGumbelTopK},
          {"params", params},
          {"seed", result.seed},
          {"threshold_public", result.threshold},
          {"budget", ToJson(result.budget)},
          {"items", std::move(items)},
          {"terminated", result.ranking.terminated()}};
}

json SnapshotToJson(const Snapshot& snapshot, const DisplayOptions& display) {
  return {{"round", snapshot.round},
          {"items", ItemsToJson(snapshot.items, display)}};
}

absl::StatusOr<StreamEvent> ParseStreamEvent(absl::string_view line,
                                             int64_t line_number) {
  auto error = [line_number](absl::string_view what) {
    return absl::InvalidArgumentError(
        absl::StrCat("Line ", line_number, ": ", what));
  };
  const json parsed = json::parse(line.begin(), line.end(), nullptr,
                                   /*allow_exceptions=*/false);
  if (parsed.is_discarded()) return error("not valid JSON.");
  if (!parsed.is_object()) return error("expected a JSON object.");
  auto round = parsed.find("round");
  if (round == parsed.end() || !round->is_number_integer()) {
    return error("'round' must be an integer.");
  }
  auto items = parsed.find("items");
  if (items == parsed.end() || !items->is_array()) {
    return error("'items' must be an array of labels.");
  }
  StreamEvent event;
  event.round = round->get<int64_t>();
  for (const json& item : *items) {
    if (!item.is_string()) return error("every item must be a string.");
    absl::StatusOr<Label> label = Label::Create(item.get<std::string>());
    if (!label.ok()) return error(label.status().message());
    event.items.push_back(*std::move(label));
  }
  return event;
}

}  // namespace dphist
