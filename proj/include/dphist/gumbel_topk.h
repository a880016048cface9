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

#ifndef DPHIST_GUMBEL_TOPK_H_
#define DPHIST_GUMBEL_TOPK_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "dphist/accountant.h"
#include "dphist/random_source.h"
#include "dphist/topk_release.h"
#include "dphist/types.h"

namespace dphist {

// A ranked list of at most k labels with no counts. If fewer than k labels
// survive the threshold the list ends with the bare sentinel.
struct RankedList {
  std::vector<Label> items;

  bool terminated() const {
    return !items.empty() && items.back().is_sentinel();
  }
  friend bool operator==(const RankedList&, const RankedList&) = default;
};

struct GumbelTopKResult {
  RankedList ranking;
  // Public threshold T.
  double threshold = 0.0;
  CdpBudget budget;
  uint64_t seed = 0;
};

// T = 1 + (1 / epsilon) * ln(l0_for_threshold / delta).
absl::StatusOr<double> GumbelThreshold(int64_t l0_for_threshold,
                                       double epsilon, double delta);

struct GumbelTopKOptions {
  // Testing only. -infinity disables the threshold entirely.
  std::optional<double> threshold_override;
};

// One-shot Gumbel top-k over a top-(kbar + 1) histogram whose counts change
// by at most 1 per user (no l0 bound). beta = 1 / epsilon.
//
// Draw order: the threshold Gumbel first, then one draw per positive-count
// entry of `truncated.top` in list order. Budget (delta, k * epsilon^2 / 8).
absl::StatusOr<GumbelTopKResult> ReleaseGumbelTopK(
    const TruncatedHistogram& truncated, int64_t k, int64_t l0_for_threshold,
    double epsilon, double delta, RandomSource& rng,
    const GumbelTopKOptions& options = {});

absl::StatusOr<GumbelTopKResult> ReleaseGumbelTopK(
    const Histogram& histogram, int64_t k, int64_t kbar,
    int64_t l0_for_threshold, double epsilon, double delta, RandomSource& rng,
    const GumbelTopKOptions& options = {});

}  // namespace dphist

#endif  // DPHIST_GUMBEL_TOPK_H_
