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

#ifndef DPHIST_UNKNOWN_DOMAIN_RELEASE_H_
#define DPHIST_UNKNOWN_DOMAIN_RELEASE_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "dphist/accountant.h"
#include "dphist/random_source.h"
#include "dphist/release_report.h"
#include "dphist/types.h"

namespace dphist {

// Thresholded release of a histogram whose labels are not known in advance.
//
// Every input count gets one independent noise draw with scale linf / epsilon
// (Laplace b or Gaussian sigma). A label is kept iff its noisy count is
// strictly greater than T. Both variants are delta-approximate
// l0 * epsilon^2 / 2-zCDP for (l0, linf)-sensitive inputs, where
//
//   Laplace:  T = linf + (linf / epsilon) * ln(l0 / (2 delta))
//   Gaussian: T = linf + (linf / epsilon) * PhiInverse(1 - delta / l0)

absl::StatusOr<double> LaplaceThreshold(const SensitivityBound& sens,
                                        double epsilon, double delta);
absl::StatusOr<double> GaussianThreshold(const SensitivityBound& sens,
                                         double epsilon, double delta);
absl::StatusOr<double> UnknownDomainThreshold(NoiseKind noise,
                                              const SensitivityBound& sens,
                                              double epsilon, double delta);

// (delta, l0 * epsilon^2 / 2), identical for both noise variants.
absl::StatusOr<CdpBudget> UnknownDomainBudget(const SensitivityBound& sens,
                                              double epsilon, double delta);

struct UnknownDomainOptions {
  // Every input count must be at least this value. The default admits any
  // positive count.
  int64_t min_count = 1;

  // Testing only: replace the calibrated noise scale (zero allowed) or
  // threshold (infinities allowed). The reported budget is unchanged.
  std::optional<double> noise_scale_override;
  std::optional<double> threshold_override;
};

// Draws noise in label order, one uniform per input entry.
absl::StatusOr<ReleaseReport> ReleaseUnknownDomain(
    const Histogram& histogram, const SensitivityBound& sens, NoiseKind noise,
    double epsilon, double delta, RandomSource& rng,
    const UnknownDomainOptions& options = {});

}  // namespace dphist

#endif  // DPHIST_UNKNOWN_DOMAIN_RELEASE_H_
