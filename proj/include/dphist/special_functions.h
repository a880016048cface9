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

#ifndef DPHIST_SPECIAL_FUNCTIONS_H_
#define DPHIST_SPECIAL_FUNCTIONS_H_

#include "absl/status/statusor.h"

namespace dphist {

// Standard normal CDF, computed from erfc so the lower tail keeps full
// relative precision.
double NormalCdf(double z);

// Standard normal upper tail 1 - Phi(z), without cancellation.
double NormalSurvival(double z);

// Inverse standard normal CDF. Rejects p outside the open interval (0, 1).
//
// A rational approximation (Acklam's coefficients, relative error about
// 1.15e-9) followed by one Halley step against NormalCdf. Absolute error is
// below 1e-9 on [1e-15, 1 - 1e-15] and in practice a few ulps.
absl::StatusOr<double> NormalInverseCdf(double p);

namespace internal {

// NormalInverseCdf without argument validation, for sampling loops that
// already guarantee 0 < p < 1.
double NormalQuantile(double p);

}  // namespace internal
}  // namespace dphist

#endif  // DPHIST_SPECIAL_FUNCTIONS_H_
