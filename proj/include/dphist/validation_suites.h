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

#ifndef DPHIST_VALIDATION_SUITES_H_
#define DPHIST_VALIDATION_SUITES_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dphist/types.h"
#include "json.hpp"

namespace dphist {

struct SuiteOptions {
  // Trials per differentiating-event check; distribution checks draw ten
  // times as many samples.
  int64_t trials = 100000;
  uint64_t seed = 0;
  int threads = 1;
};

// Runs one named suite ("alg1", "topk", "gumbel", "stream" or "renyi") and
// returns {suite, trials, seed, checks: [...], pass}. Every check carries its
// measured values, its bound, and a "pass" flag. Output depends only on the
// arguments.
absl::StatusOr<nlohmann::json> RunValidationSuite(absl::string_view suite,
                                                  const SuiteOptions& options);

struct TopKInstance {
  Histogram histogram;
  int64_t k = 1;
  double epsilon = 1.0;
};

// Twenty fixed instances with at most five items and k <= 3.
std::vector<TopKInstance> GumbelEquivalenceCorpus();

// Allowed TV distance between an n-sample empirical law and the exact one:
// 0.01 at one million samples, widened as 1 / sqrt(n) below that.
double GumbelTvTolerance(int64_t samples);

}  // namespace dphist

#endif  // DPHIST_VALIDATION_SUITES_H_
