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

#ifndef DPHIST_ACCOUNTANT_H_
#define DPHIST_ACCOUNTANT_H_

#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "json.hpp"

namespace dphist {

// delta-approximate rho-zCDP. delta == 0 is pure zCDP.
struct CdpBudget {
  static absl::StatusOr<CdpBudget> Create(double delta, double rho);

  double delta = 0.0;
  double rho = 0.0;

  friend bool operator==(const CdpBudget&, const CdpBudget&) = default;
};

// (epsilon, delta)-DP. delta == 0 is pure DP.
struct DpBudget {
  static absl::StatusOr<DpBudget> Create(double epsilon, double delta);

  double epsilon = 0.0;
  double delta = 0.0;

  friend bool operator==(const DpBudget&, const DpBudget&) = default;
};

// Laplace mechanism with scale b on an l1-sensitivity query: (l1 / b, 0)-DP.
absl::StatusOr<DpBudget> LaplacePureDp(double l1_sensitivity, double scale);

// Gaussian mechanism with standard deviation sigma: l2^2 / (2 sigma^2)-zCDP.
absl::StatusOr<CdpBudget> GaussianCdp(double l2_sensitivity, double sigma);

// Exponential mechanism at parameter epsilon (bounded range): epsilon^2 / 8.
absl::StatusOr<CdpBudget> ExpMechCdp(double epsilon);

// (eps, delta)-DP implies delta-approximate eps^2 / 2-zCDP.
CdpBudget DpToCdp(const DpBudget& budget);

// delta-approximate rho-zCDP implies
// (rho + 2 sqrt(rho ln(1 / delta_prime)), delta + delta_prime)-DP.
absl::StatusOr<DpBudget> CdpToDp(const CdpBudget& budget, double delta_prime);

// Searches delta_prime on a 512-point log-spaced grid over
// (0, total_delta - budget.delta] and returns the conversion with the
// smallest epsilon whose deltas sum to at most total_delta.
absl::StatusOr<DpBudget> CdpToDpOptimize(const CdpBudget& budget,
                                         double total_delta);

// Adaptive composition: rho adds and deltas combine as
// 1 - prod(1 - delta_i). The summands are sorted first, so the result is
// bit-identical for every permutation of the input.
absl::StatusOr<CdpBudget> Compose(absl::Span<const CdpBudget> budgets);

nlohmann::json ToJson(const CdpBudget& budget);
nlohmann::json ToJson(const DpBudget& budget);
absl::StatusOr<CdpBudget> CdpBudgetFromJson(const nlohmann::json& json);
absl::StatusOr<DpBudget> DpBudgetFromJson(const nlohmann::json& json);

}  // namespace dphist

#endif  // DPHIST_ACCOUNTANT_H_
