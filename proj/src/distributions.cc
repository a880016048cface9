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

#include "dphist/distributions.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dphist/special_functions.h"

namespace dphist {
namespace {

absl::Status ValidateScale(NoiseKind kind, double scale) {
  return NoiseSpec::Create(kind, scale).status();
}

absl::Status ValidateUniform(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Uniform draw must lie in (0, 1), got ", u, "."));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> FromUniform(NoiseKind kind, double scale, double u) {
  if (absl::Status s = ValidateScale(kind, scale); !s.ok()) return s;
  if (absl::Status s = ValidateUniform(u); !s.ok()) return s;
  return scale * internal::UnitNoise(kind, u);
}

absl::StatusOr<double> Sample(NoiseKind kind, double scale,
                              RandomSource& rng) {
  if (absl::Status s = ValidateScale(kind, scale); !s.ok()) return s;
  return scale * internal::UnitNoise(kind, rng.Uniform());
}

}  // namespace

namespace internal {

double UnitLaplace(double u) {
  // 1 - u is exact for u >= 0.5.
  if (u < 0.5) return std::log(2.0 * u);
  return -std::log(2.0 * (1.0 - u));
}

double UnitGaussian(double u) { return NormalQuantile(u); }

double UnitGumbel(double u) { return -std::log(-std::log(u)); }

double UnitNoise(NoiseKind kind, double u) {
  switch (kind) {
    case NoiseKind::kLaplace:
      return UnitLaplace(u);
    case NoiseKind::kGaussian:
      return UnitGaussian(u);
    case NoiseKind::kGumbel:
      return UnitGumbel(u);
  }
  return 0.0;
}

}  // namespace internal

absl::StatusOr<double> SampleLaplace(double scale, RandomSource& rng) {
  return Sample(NoiseKind::kLaplace, scale, rng);
}

absl::StatusOr<double> SampleGaussian(double sigma, RandomSource& rng) {
  return Sample(NoiseKind::kGaussian, sigma, rng);
}

absl::StatusOr<double> SampleGumbel(double beta, RandomSource& rng) {
  return Sample(NoiseKind::kGumbel, beta, rng);
}

absl::StatusOr<double> SampleNoise(const NoiseSpec& spec, RandomSource& rng) {
  return Sample(spec.kind, spec.scale, rng);
}

absl::StatusOr<double> LaplaceFromUniform(double scale, double u) {
  return FromUniform(NoiseKind::kLaplace, scale, u);
}

absl::StatusOr<double> GaussianFromUniform(double sigma, double u) {
  return FromUniform(NoiseKind::kGaussian, sigma, u);
}

absl::StatusOr<double> GumbelFromUniform(double beta, double u) {
  return FromUniform(NoiseKind::kGumbel, beta, u);
}

}  // namespace dphist
