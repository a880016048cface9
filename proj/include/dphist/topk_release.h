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

#ifndef DPHIST_TOPK_RELEASE_H_
#define DPHIST_TOPK_RELEASE_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dphist/accountant.h"
#include "dphist/random_source.h"
#include "dphist/release_report.h"
#include "dphist/types.h"

namespace dphist {

// The kbar largest entries of a histogram plus the (kbar + 1)-th count.
//
// `top` always has exactly kbar entries, sorted by count descending and then
// by label ascending; short histograms are padded with sentinel labels of
// count 0. `next_count` is 0 when the histogram has at most kbar entries.
struct TruncatedHistogram {
  std::vector<std::pair<Label, int64_t>> top;
  int64_t next_count = 0;
};

// Ties in count are broken by byte-lexicographic label order.
absl::StatusOr<TruncatedHistogram> TruncateTopK(const Histogram& histogram,
                                                int64_t kbar);

// T = linf + sqrt(2) * (linf / epsilon) * PhiInverse(1 - delta / l0).
absl::StatusOr<double> TopKThreshold(const SensitivityBound& sens,
                                     double epsilon, double delta);

struct TopKOptions {
  // Testing only, as in UnknownDomainOptions.
  std::optional<double> sigma_override;
  std::optional<double> threshold_override;
};

// Gaussian release from a top-(kbar + 1) histogram with a noisy,
// data-dependent threshold T + c_(kbar+1) + N(0, sigma^2), sigma =
// linf / epsilon. Draw order: the threshold noise first, then one draw per
// `top` entry in list order (sentinels included). Sentinels are never
// released. Budget is (delta, l0 * epsilon^2 / 2); the report records only
// the public T.
absl::StatusOr<ReleaseReport> ReleaseTopK(const TruncatedHistogram& truncated,
                                          const SensitivityBound& sens,
                                          double epsilon, double delta,
                                          RandomSource& rng,
                                          const TopKOptions& options = {});

absl::StatusOr<ReleaseReport> ReleaseTopK(const Histogram& histogram,
                                          int64_t kbar,
                                          const SensitivityBound& sens,
                                          double epsilon, double delta,
                                          RandomSource& rng,
                                          const TopKOptions& options = {});

}  // namespace dphist

#endif  // DPHIST_TOPK_RELEASE_H_
