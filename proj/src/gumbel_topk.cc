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

#include "dphist/gumbel_topk.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dphist/distributions.h"
#include "dphist/internal/params.h"
#include "dphist/internal/status_macros.h"

namespace dphist {
namespace {

struct Candidate {
  const Label* label;
  double noisy;
};

}  // namespace

absl::StatusOr<double> GumbelThreshold(int64_t l0_for_threshold,
                                       double epsilon, double delta) {
  if (l0_for_threshold < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "l0 for the threshold must be at least 1, got ", l0_for_threshold,
        "."));
  }
  DPHIST_RETURN_IF_ERROR(internal::ValidateEpsilon(epsilon));
  DPHIST_RETURN_IF_ERROR(internal::ValidateOpenDelta(delta));
  return 1.0 +
         std::log(static_cast<double>(l0_for_threshold) / delta) / epsilon;
}

absl::StatusOr<GumbelTopKResult> ReleaseGumbelTopK(
    const TruncatedHistogram& truncated, int64_t k, int64_t l0_for_threshold,
    double epsilon, double delta, RandomSource& rng,
    const GumbelTopKOptions& options) {
  DPHIST_ASSIGN_OR_RETURN(double threshold,
                          GumbelThreshold(l0_for_threshold, epsilon, delta));
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must be at least 1, got ", k, "."));
  }
  if (static_cast<size_t>(k) > truncated.top.size()) {
    return absl::InvalidArgumentError("k must not exceed kbar.");
  }
  DPHIST_ASSIGN_OR_RETURN(
      const CdpBudget budget,
      CdpBudget::Create(delta,
                        static_cast<double>(k) * epsilon * epsilon / 8.0));
  if (options.threshold_override.has_value()) {
    DPHIST_RETURN_IF_ERROR(
        internal::ValidateThresholdOverride(*options.threshold_override));
    threshold = *options.threshold_override;
  }

  const double beta = 1.0 / epsilon;
  const double noisy_threshold =
      threshold + static_cast<double>(truncated.next_count) +
      beta * internal::UnitGumbel(rng.Uniform());

  std::vector<Candidate> survivors;
  survivors.reserve(truncated.top.size());
  for (const auto& [label, count] : truncated.top) {
    if (count <= 0) continue;
    const double noisy = static_cast<double>(count) +
                         beta * internal::UnitGumbel(rng.Uniform());
    if (noisy > noisy_threshold) survivors.push_back({&label, noisy});
  }
  std::sort(survivors.begin(), survivors.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.noisy != b.noisy) return a.noisy > b.noisy;
              return *a.label < *b.label;
            });

  GumbelTopKResult result;
  result.threshold = threshold;
  result.budget = budget;
  result.seed = rng.seed();
  const size_t keep = std::min(survivors.size(), static_cast<size_t>(k));
  result.ranking.items.reserve(keep + 1);
  for (size_t i = 0; i < keep; ++i) {
    result.ranking.items.push_back(*survivors[i].label);
  }
  if (keep < static_cast<size_t>(k)) {
    result.ranking.items.push_back(Label::Sentinel());
  }
  return result;
}

absl::StatusOr<GumbelTopKResult> ReleaseGumbelTopK(
    const Histogram& histogram, int64_t k, int64_t kbar,
    int64_t l0_for_threshold, double epsilon, double delta, RandomSource& rng,
    const GumbelTopKOptions& options) {
  if (k > kbar) return absl::InvalidArgumentError("k must not exceed kbar.");
  DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram truncated,
                          TruncateTopK(histogram, kbar));
  return ReleaseGumbelTopK(truncated, k, l0_for_threshold, epsilon, delta, rng,
                           options);
}

}  // namespace dphist
