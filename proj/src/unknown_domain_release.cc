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

#include "dphist/unknown_domain_release.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dphist/distributions.h"
#include "dphist/internal/params.h"
#include "dphist/internal/status_macros.h"
#include "dphist/special_functions.h"

namespace dphist {
namespace {

absl::Status ValidateCommon(const SensitivityBound& sens, double epsilon,
                            double delta) {
  DPHIST_RETURN_IF_ERROR(internal::RequireBoundedL0(sens, "Unknown-domain release"));
  DPHIST_RETURN_IF_ERROR(internal::ValidateEpsilon(epsilon));
  return internal::ValidateOpenDelta(delta);
}

}  // namespace

absl::StatusOr<double> LaplaceThreshold(const SensitivityBound& sens,
                                        double epsilon, double delta) {
  DPHIST_RETURN_IF_ERROR(ValidateCommon(sens, epsilon, delta));
  const double l0 = static_cast<double>(sens.l0());
  return sens.linf() + (sens.linf() / epsilon) * std::log(l0 / (2.0 * delta));
}

absl::StatusOr<double> GaussianThreshold(const SensitivityBound& sens,
                                         double epsilon, double delta) {
  DPHIST_RETURN_IF_ERROR(ValidateCommon(sens, epsilon, delta));
  const double tail = delta / static_cast<double>(sens.l0());
  // PhiInverse(1 - q) == -PhiInverse(q); using q directly avoids rounding
  // 1 - q.
  DPHIST_ASSIGN_OR_RETURN(const double lower, NormalInverseCdf(tail));
  return sens.linf() - (sens.linf() / epsilon) * lower;
}

absl::StatusOr<double> UnknownDomainThreshold(NoiseKind noise,
                                              const SensitivityBound& sens,
                                              double epsilon, double delta) {
  switch (noise) {
    case NoiseKind::kLaplace:
      return LaplaceThreshold(sens, epsilon, delta);
    case NoiseKind::kGaussian:
      return GaussianThreshold(sens, epsilon, delta);
    case NoiseKind::kGumbel:
      break;
  }
  return absl::InvalidArgumentError(
      "Unknown-domain release supports laplace or gaussian noise only.");
}

absl::StatusOr<CdpBudget> UnknownDomainBudget(const SensitivityBound& sens,
                                              double epsilon, double delta) {
  DPHIST_RETURN_IF_ERROR(ValidateCommon(sens, epsilon, delta));
  return CdpBudget::Create(
      delta, static_cast<double>(sens.l0()) * epsilon * epsilon / 2.0);
}

absl::StatusOr<ReleaseReport> ReleaseUnknownDomain(
    const Histogram& histogram, const SensitivityBound& sens, NoiseKind noise,
    double epsilon, double delta, RandomSource& rng,
    const UnknownDomainOptions& options) {
  DPHIST_ASSIGN_OR_RETURN(double threshold,
                          UnknownDomainThreshold(noise, sens, epsilon, delta));
  DPHIST_ASSIGN_OR_RETURN(CdpBudget budget,
                          UnknownDomainBudget(sens, epsilon, delta));
  if (options.min_count < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "min_count must be at least 1, got ", options.min_count, "."));
  }
  for (const auto& [label, count] : histogram) {
    if (count < options.min_count) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Label '", label.value(), "' has count ", count,
          "; unknown-domain release only accepts counts >= ",
          options.min_count, "."));
    }
  }

  double scale = sens.linf() / epsilon;
  if (options.noise_scale_override.has_value()) {
    DPHIST_RETURN_IF_ERROR(
        internal::ValidateScaleOverride(*options.noise_scale_override));
    scale = *options.noise_scale_override;
  }
  if (options.threshold_override.has_value()) {
    DPHIST_RETURN_IF_ERROR(
        internal::ValidateThresholdOverride(*options.threshold_override));
    threshold = *options.threshold_override;
  }

  ReleaseReport report;
  report.mechanism = noise == NoiseKind::kLaplace
                         ? kMechanismUnknownDomainLaplace
                         : kMechanismUnknownDomainGaussian;
  report.threshold = threshold;
  report.budget = budget;
  report.seed = rng.seed();
  for (const auto& [label, count] : histogram) {
    const double noisy = static_cast<double>(count) +
                         scale * internal::UnitNoise(noise, rng.Uniform());
    if (noisy > threshold) report.items.push_back({label, noisy});
  }
  return report;
}

}  // namespace dphist
