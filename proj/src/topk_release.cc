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

#include "dphist/topk_release.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dphist/distributions.h"
#include "dphist/internal/params.h"
#include "dphist/internal/status_macros.h"
#include "dphist/special_functions.h"

namespace dphist {

absl::StatusOr<TruncatedHistogram> TruncateTopK(const Histogram& histogram,
                                                int64_t kbar) {
  if (kbar < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("kbar must be at least 1, got ", kbar, "."));
  }
  std::vector<std::pair<Label, int64_t>> ranked(histogram.begin(),
                                                histogram.end());
  // The histogram iterates in label order, so a stable sort by count alone
  // leaves ties in label order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  const size_t keep = static_cast<size_t>(kbar);
  TruncatedHistogram truncated;
  truncated.next_count = ranked.size() > keep ? ranked[keep].second : 0;
  if (ranked.size() > keep) ranked.erase(ranked.begin() + kbar, ranked.end());
  truncated.top = std::move(ranked);
  for (int j = 1; truncated.top.size() < keep; ++j) {
    truncated.top.emplace_back(Label::Sentinel(j), 0);
  }
  return truncated;
}

absl::StatusOr<double> TopKThreshold(const SensitivityBound& sens,
                                     double epsilon, double delta) {
  DPHIST_RETURN_IF_ERROR(internal::RequireBoundedL0(sens, "Top-k release"));
  DPHIST_RETURN_IF_ERROR(internal::ValidateEpsilon(epsilon));
  DPHIST_RETURN_IF_ERROR(internal::ValidateOpenDelta(delta));
  DPHIST_ASSIGN_OR_RETURN(
      const double lower,
      NormalInverseCdf(delta / static_cast<double>(sens.l0())));
  return sens.linf() - std::numbers::sqrt2 * (sens.linf() / epsilon) * lower;
}

absl::StatusOr<ReleaseReport> ReleaseTopK(const TruncatedHistogram& truncated,
                                          const SensitivityBound& sens,
                                          double epsilon, double delta,
                                          RandomSource& rng,
                                          const TopKOptions& options) {
  DPHIST_ASSIGN_OR_RETURN(double threshold,
                          TopKThreshold(sens, epsilon, delta));
  DPHIST_ASSIGN_OR_RETURN(
      const CdpBudget budget,
      CdpBudget::Create(
          delta, static_cast<double>(sens.l0()) * epsilon * epsilon / 2.0));
  if (truncated.top.empty()) {
    return absl::InvalidArgumentError("Truncated histogram has no entries.");
  }
  for (size_t i = 0; i < truncated.top.size(); ++i) {
    const int64_t count = truncated.top[i].second;
    if (count < truncated.next_count ||
        (i > 0 && count > truncated.top[i - 1].second)) {
      return absl::InvalidArgumentError(
          "Truncated histogram counts must be non-increasing and at least "
          "next_count.");
    }
  }
  if (truncated.next_count < 0) {
    return absl::InvalidArgumentError("next_count must be non-negative.");
  }
  double sigma = sens.linf() / epsilon;
  if (options.sigma_override.has_value()) {
    DPHIST_RETURN_IF_ERROR(
        internal::ValidateScaleOverride(*options.sigma_override));
    sigma = *options.sigma_override;
  }
  if (options.threshold_override.has_value()) {
    DPHIST_RETURN_IF_ERROR(
        internal::ValidateThresholdOverride(*options.threshold_override));
    threshold = *options.threshold_override;
  }

  const double noisy_threshold =
      threshold + static_cast<double>(truncated.next_count) +
      sigma * internal::UnitGaussian(rng.Uniform());

  ReleaseReport report;
  report.mechanism = kMechanismTopKGaussian;
  report.threshold = threshold;
  report.budget = budget;
  report.seed = rng.seed();
  for (const auto& [label, count] : truncated.top) {
    const double noisy = static_cast<double>(count) +
                         sigma * internal::UnitGaussian(rng.Uniform());
    if (noisy > noisy_threshold && !label.is_sentinel()) {
      report.items.push_back({label, noisy});
    }
  }
  std::sort(report.items.begin(), report.items.end(),
            [](const NoisyCount& a, const NoisyCount& b) {
              return a.label < b.label;
            });
  return report;
}

absl::StatusOr<ReleaseReport> ReleaseTopK(const Histogram& histogram,
                                          int64_t kbar,
                                          const SensitivityBound& sens,
                                          double epsilon, double delta,
                                          RandomSource& rng,
                                          const TopKOptions& options) {
  DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram truncated,
                          TruncateTopK(histogram, kbar));
  return ReleaseTopK(truncated, sens, epsilon, delta, rng, options);
}

}  // namespace dphist
