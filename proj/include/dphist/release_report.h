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

#ifndef DPHIST_RELEASE_REPORT_H_
#define DPHIST_RELEASE_REPORT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dphist/accountant.h"
#include "dphist/types.h"

namespace dphist {

// Output of a thresholded noisy-count release.
//
// Invariants: every released label occurs in the input and every released
// noisy count is strictly above the threshold that was applied. `threshold`
// is the public, data-independent threshold T; a data-dependent noisy
// threshold is never recorded.
struct ReleaseReport {
  std::string mechanism;
  // Sorted by label.
  std::vector<NoisyCount> items;
  double threshold = 0.0;
  CdpBudget budget;
  uint64_t seed = 0;
};

// Mechanism tags used in reports.
inline constexpr char kMechanismUnknownDomainLaplace[] =
    "unknown_domain_laplace";
inline constexpr char kMechanismUnknownDomainGaussian[] =
    "unknown_domain_gaussian";
inline constexpr char kMechanismTopKGaussian[] = "topk_gaussian";
inline constexpr char kMechanismGumbelTopK[] = "gumbel_topk";
inline constexpr char kMechanismContinualCounter[] = "continual_counter";

}  // namespace dphist

#endif  // DPHIST_RELEASE_REPORT_H_
