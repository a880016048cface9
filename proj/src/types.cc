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

#include "dphist/types.h"

#include <cmath>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"

namespace dphist {

absl::StatusOr<Label> Label::Create(std::string value) {
  if (value.empty()) {
    return absl::InvalidArgumentError("Label must be non-empty.");
  }
  if (absl::StartsWith(value, kReservedLabelPrefix)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Label '", value,
                     "' uses the reserved sentinel prefix and cannot be "
                     "supplied as input."));
  }
  return Label(std::move(value));
}

Label Label::Sentinel(int index) {
  if (index <= 0) return Label(std::string(kReservedLabelPrefix));
  return Label(absl::StrCat(kReservedLabelPrefix, index));
}

bool Label::is_sentinel() const {
  return absl::StartsWith(value_, kReservedLabelPrefix);
}

absl::StatusOr<Histogram> Histogram::FromPairs(
    const std::vector<std::pair<std::string, int64_t>>& pairs) {
  Histogram histogram;
  for (const auto& [name, count] : pairs) {
    absl::StatusOr<Label> label = Label::Create(name);
    if (!label.ok()) return label.status();
    absl::Status status = histogram.Insert(*std::move(label), count);
    if (!status.ok()) return status;
  }
  return histogram;
}

absl::StatusOr<Histogram> Histogram::FromPairs(
    std::initializer_list<std::pair<std::string, int64_t>> pairs) {
  return FromPairs(std::vector<std::pair<std::string, int64_t>>(pairs));
}

absl::Status Histogram::Insert(Label label, int64_t count) {
  if (count < 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Count for label '", label.value(), "' must be non-negative, got ",
        count, "."));
  }
  auto [it, inserted] = entries_.emplace(std::move(label), count);
  if (!inserted) {
    return absl::InvalidArgumentError(
        absl::StrCat("Duplicate label '", it->first.value(), "'."));
  }
  return absl::OkStatus();
}

std::optional<int64_t> Histogram::Count(const Label& label) const {
  auto it = entries_.find(label);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<SensitivityBound> SensitivityBound::Create(int64_t l0,
                                                          double linf) {
  if (l0 < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("l0 sensitivity must be at least 1, got ", l0, "."));
  }
  if (!(linf > 0) || !std::isfinite(linf)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "linf sensitivity must be positive and finite, got ", linf, "."));
  }
  return SensitivityBound(l0, linf);
}

absl::StatusOr<SensitivityBound> SensitivityBound::UnboundedL0(double linf) {
  if (!(linf > 0) || !std::isfinite(linf)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "linf sensitivity must be positive and finite, got ", linf, "."));
  }
  return SensitivityBound(std::nullopt, linf);
}

absl::string_view NoiseKindName(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kLaplace:
      return "laplace";
    case NoiseKind::kGaussian:
      return "gaussian";
    case NoiseKind::kGumbel:
      return "gumbel";
  }
  return "unknown";
}

absl::StatusOr<NoiseKind> ParseNoiseKind(absl::string_view name) {
  if (name == "laplace") return NoiseKind::kLaplace;
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "gumbel") return NoiseKind::kGumbel;
  return absl::InvalidArgumentError(absl::StrCat(
      "Unknown noise '", name, "'; expected laplace, gaussian or gumbel."));
}

absl::StatusOr<NoiseSpec> NoiseSpec::Create(NoiseKind kind, double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(absl::StrCat(
        NoiseKindName(kind), " scale must be positive and finite, got ", scale,
        "."));
  }
  return NoiseSpec{kind, scale};
}

}  // namespace dphist
