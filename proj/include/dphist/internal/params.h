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

#ifndef DPHIST_INTERNAL_PARAMS_H_
#define DPHIST_INTERNAL_PARAMS_H_

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "dphist/types.h"

namespace dphist::internal {

inline absl::Status ValidateEpsilon(double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "epsilon must be positive and finite, got ", epsilon, "."));
  }
  return absl::OkStatus();
}

inline absl::Status ValidateOpenDelta(double delta) {
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta, "."));
  }
  return absl::OkStatus();
}

inline absl::Status RequireBoundedL0(const SensitivityBound& sens,
                                     absl::string_view mechanism) {
  if (!sens.l0_bounded()) {
    return absl::InvalidArgumentError(absl::StrCat(
        mechanism, " needs a finite l0 sensitivity."));
  }
  return absl::OkStatus();
}

// Test-only scale overrides may be zero; thresholds may be infinite.
inline absl::Status ValidateScaleOverride(double scale) {
  if (!(scale >= 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Noise scale override must be non-negative, got ", scale, "."));
  }
  return absl::OkStatus();
}

inline absl::Status ValidateThresholdOverride(double threshold) {
  if (std::isnan(threshold)) {
    return absl::InvalidArgumentError("Threshold override must not be NaN.");
  }
  return absl::OkStatus();
}

}  // namespace dphist::internal

#endif  // DPHIST_INTERNAL_PARAMS_H_
