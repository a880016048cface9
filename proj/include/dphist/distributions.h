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

#ifndef DPHIST_DISTRIBUTIONS_H_
#define DPHIST_DISTRIBUTIONS_H_

#include "absl/status/statusor.h"
#include "dphist/random_source.h"
#include "dphist/types.h"

namespace dphist {

// Noise samplers. Every draw is the inverse CDF of exactly one uniform from
// the RandomSource, so a draw is a pure function of that uniform.

absl::StatusOr<double> SampleLaplace(double scale, RandomSource& rng);
absl::StatusOr<double> SampleGaussian(double sigma, RandomSource& rng);
absl::StatusOr<double> SampleGumbel(double beta, RandomSource& rng);
absl::StatusOr<double> SampleNoise(const NoiseSpec& spec, RandomSource& rng);

// Inverse CDFs at a given uniform u in (0, 1).
absl::StatusOr<double> LaplaceFromUniform(double scale, double u);
absl::StatusOr<double> GaussianFromUniform(double sigma, double u);
absl::StatusOr<double> GumbelFromUniform(double beta, double u);

namespace internal {

// Unit-scale inverse CDFs, unchecked. Callers multiply by the scale.
double UnitLaplace(double u);
double UnitGaussian(double u);
double UnitGumbel(double u);
double UnitNoise(NoiseKind kind, double u);

}  // namespace internal
}  // namespace dphist

#endif  // DPHIST_DISTRIBUTIONS_H_
