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

#include "dphist/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"

namespace dphist {
namespace {

constexpr int kOptimizeGridPoints = 512;
// The grid spans ten decades below the available delta headroom.
constexpr double kOptimizeGridDecades = 10.0;

absl::Status CheckPositive(absl::string_view name, double value) {
  if (!(value > 0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive and finite, got ", value, "."));
  }
  return absl::OkStatus();
}

absl::Status CheckDelta(absl::string_view name, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must lie in [0, 1), got ", delta, "."));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> RequireNumber(const nlohmann::json& json,
                                     const char* key) {
  if (!json.is_object() || !json.contains(key) || !json[key].is_number()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Budget JSON is missing numeric field '", key, "'."));
  }
  return json[key].get<double>();
}

}  // namespace

absl::StatusOr<CdpBudget> CdpBudget::Create(double delta, double rho) {
  if (absl::Status s = CheckDelta("delta", delta); !s.ok()) return s;
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "rho must be non-negative and finite, got ", rho, "."));
  }
  return CdpBudget{delta, rho};
}

absl::StatusOr<DpBudget> DpBudget::Create(double epsilon, double delta) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "epsilon must be non-negative and finite, got ", epsilon, "."));
  }
  if (absl::Status s = CheckDelta("delta", delta); !s.ok()) return s;
  return DpBudget{epsilon, delta};
}

absl::StatusOr<DpBudget> LaplacePureDp(double l1_sensitivity, double scale) {
  if (absl::Status s = CheckPositive("l1 sensitivity", l1_sensitivity);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckPositive("Laplace scale", scale); !s.ok()) {
    return s;
  }
  return DpBudget{l1_sensitivity / scale, 0.0};
}

absl::StatusOr<CdpBudget> GaussianCdp(double l2_sensitivity, double sigma) {
  if (absl::Status s = CheckPositive("l2 sensitivity", l2_sensitivity);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = CheckPositive("sigma", sigma); !s.ok()) return s;
  return CdpBudget{0.0, l2_sensitivity * l2_sensitivity / (2.0 * sigma * sigma)};
}

absl::StatusOr<CdpBudget> ExpMechCdp(double epsilon) {
  if (absl::Status s = CheckPositive("epsilon", epsilon); !s.ok()) return s;
  return CdpBudget{0.0, epsilon * epsilon / 8.0};
}

CdpBudget DpToCdp(const DpBudget& budget) {
  return CdpBudget{budget.delta, budget.epsilon * budget.epsilon / 2.0};
}

absl::StatusOr<DpBudget> CdpToDp(const CdpBudget& budget, double delta_prime) {
  if (!(delta_prime > 0.0 && delta_prime < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "delta_prime must lie in (0, 1), got ", delta_prime, "."));
  }
  const double delta = budget.delta + delta_prime;
  if (!(delta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "delta + delta_prime = ", delta, " leaves no meaningful guarantee."));
  }
  const double epsilon =
      budget.rho + 2.0 * std::sqrt(budget.rho * -std::log(delta_prime));
  return DpBudget{epsilon, delta};
}

absl::StatusOr<DpBudget> CdpToDpOptimize(const CdpBudget& budget,
                                         double total_delta) {
  if (!(total_delta > budget.delta && total_delta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "total_delta must lie in (", budget.delta, ", 1), got ", total_delta,
        "."));
  }
  const double headroom = total_delta - budget.delta;
  DpBudget best{std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i < kOptimizeGridPoints; ++i) {
    const double exponent =
        -kOptimizeGridDecades *
        (1.0 - static_cast<double>(i) / (kOptimizeGridPoints - 1));
    const double delta_prime = headroom * std::pow(10.0, exponent);
    absl::StatusOr<DpBudget> candidate = CdpToDp(budget, delta_prime);
    if (!candidate.ok()) continue;
    if (candidate->epsilon < best.epsilon) best = *candidate;
  }
  if (!std::isfinite(best.epsilon)) {
    return absl::InvalidArgumentError("No feasible delta_prime on the grid.");
  }
  return best;
}

absl::StatusOr<CdpBudget> Compose(absl::Span<const CdpBudget> budgets) {
  if (budgets.empty()) {
    return absl::InvalidArgumentError("Cannot compose an empty budget list.");
  }
  for (const CdpBudget& b : budgets) {
    if (absl::Status s = CdpBudget::Create(b.delta, b.rho).status(); !s.ok()) {
      return s;
    }
  }
  std::vector<CdpBudget> sorted(budgets.begin(), budgets.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const CdpBudget& a, const CdpBudget& b) {
              return std::tie(a.rho, a.delta) < std::tie(b.rho, b.delta);
            });
  CdpBudget total{0.0, 0.0};
  for (const CdpBudget& b : sorted) {
    total.rho += b.rho;
    // d1 + d2 - d1 * d2.
    total.delta += (1.0 - total.delta) * b.delta;
  }
  return total;
}

nlohmann::json ToJson(const CdpBudget& budget) {
  return nlohmann::json{{"delta", budget.delta}, {"rho", budget.rho}};
}

nlohmann::json ToJson(const DpBudget& budget) {
  return nlohmann::json{{"delta", budget.delta}, {"epsilon", budget.epsilon}};
}

absl::StatusOr<CdpBudget> CdpBudgetFromJson(const nlohmann::json& json) {
  absl::StatusOr<double> rho = RequireNumber(json, "rho");
  if (!rho.ok()) return rho.status();
  absl::StatusOr<double> delta = RequireNumber(json, "delta");
  if (!delta.ok()) return delta.status();
  return CdpBudget::Create(*delta, *rho);
}

absl::StatusOr<DpBudget> DpBudgetFromJson(const nlohmann::json& json) {
  absl::StatusOr<double> epsilon = RequireNumber(json, "epsilon");
  if (!epsilon.ok()) return epsilon.status();
  absl::StatusOr<double> delta = RequireNumber(json, "delta");
  if (!delta.ok()) return delta.status();
  return DpBudget::Create(*epsilon, *delta);
}

}  // namespace dphist
