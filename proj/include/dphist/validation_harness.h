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

// Statistical checks for the unknown-domain mechanisms: Monte-Carlo
// estimation of differentiating-outcome probabilities on worst-case neighbor
// pairs, exact small-instance exponential-mechanism distributions, and
// distribution distances.

#ifndef DPHIST_VALIDATION_HARNESS_H_
#define DPHIST_VALIDATION_HARNESS_H_

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dphist/continual_counter.h"
#include "dphist/gumbel_topk.h"
#include "dphist/random_source.h"
#include "dphist/topk_release.h"
#include "dphist/types.h"
#include "dphist/unknown_domain_release.h"

namespace dphist {

// Two histograms that differ by one user's contribution. `base` holds the
// extra user.
struct HistogramNeighborPair {
  Histogram base;
  Histogram neighbor;
  std::string description;
};

// Two streams that differ in a single event: `neighbor` has an empty item set
// at `differing_round`.
struct StreamNeighborPair {
  std::vector<StreamEvent> base;
  std::vector<StreamEvent> neighbor;
  int64_t differing_round = 0;
  std::string description;
};

using NeighborPair = std::variant<HistogramNeighborPair, StreamNeighborPair>;

// Checks that removing one user turns `base` into `neighbor`: counts only go
// down, by at most linf each, on at most l0 labels (any number if l0 is
// unbounded).
absl::Status ValidateNeighborPair(const HistogramNeighborPair& pair,
                                  const SensitivityBound& sens);
// Checks that the streams differ in exactly one round, where the neighbor is
// empty, and that every event has at most l0 items.
absl::Status ValidateNeighborPair(const StreamNeighborPair& pair, int64_t l0);

struct BoundaryShape {
  // l0 and linf of the pair; linf must be a whole number. "gumbel" ignores
  // both: its pairs differ by one on kbar labels.
  int64_t l0 = 1;
  double linf = 1.0;
  // "topk" and "gumbel": number of top entries kept.
  int64_t kbar = 1;
  // "stream".
  int64_t horizon = 4;
  int64_t debut_round = 2;
  // "alg1": when positive, both histograms also hold label "z" at this count.
  int64_t common_count = 0;
};

// Builds the worst-case pair used in each mechanism's privacy argument.
//
//   "alg1":   base has l0 items at count exactly linf (plus the optional
//             common item); the neighbor has none of them.
//   "topk":   l0 items at c + linf over kbar fillers at c; the neighbor drops
//             those items to c, where the fillers win the tie so none of the
//             items is in the neighbor's top-kbar.
//   "gumbel": kbar items at count c over kbar fillers at c - 1; the neighbor
//             lowers the items by one, as above.
//   "stream": l0 fresh labels debut at `debut_round` and never recur, with a
//             common label in every other round; the neighbor is empty at
//             the debut round.
absl::StatusOr<NeighborPair> MakeBoundaryNeighbors(absl::string_view mechanism,
                                                   const BoundaryShape& shape);

struct UnknownDomainMechanism {
  NoiseKind noise = NoiseKind::kGaussian;
  int64_t l0 = 1;
  double linf = 1.0;
  double epsilon = 1.0;
  double delta = 0.05;
  UnknownDomainOptions options;
};

struct TopKMechanism {
  int64_t kbar = 1;
  int64_t l0 = 1;
  double linf = 1.0;
  double epsilon = 1.0;
  double delta = 0.05;
  TopKOptions options;
};

struct GumbelMechanism {
  int64_t k = 1;
  int64_t kbar = 1;
  int64_t l0_for_threshold = 1;
  double epsilon = 1.0;
  double delta = 0.05;
  GumbelTopKOptions options;
};

// The config seed is replaced per trial.
struct StreamMechanism {
  CounterConfig config;
};

using MechanismConfig = std::variant<UnknownDomainMechanism, TopKMechanism,
                                     GumbelMechanism, StreamMechanism>;

// Frequency of an event over Monte-Carlo trials with its one-sided 99% Wilson
// upper bound.
struct DeltaEstimate {
  double point = 0.0;
  double upper = 0.0;
  int64_t hits = 0;
  int64_t trials = 0;
};

inline constexpr int64_t kMinDeltaTrials = 10000;
inline constexpr double kWilsonConfidence = 0.99;

// One-sided Wilson score upper bound at `confidence`.
double WilsonUpperBound(int64_t hits, int64_t trials,
                        double confidence = kWilsonConfidence);

struct HarnessOptions {
  // Trials are split into fixed-size shards, each with a child seed, so the
  // result does not depend on the thread count.
  int threads = 1;
};

// Runs the mechanism on `pair.base` `trials` times and counts runs whose
// output names a label the neighbor could never emit. Needs at least
// kMinDeltaTrials trials.
absl::StatusOr<DeltaEstimate> EstimateDeltaEvent(
    const NeighborPair& pair, const MechanismConfig& mechanism, int64_t trials,
    RandomSource& rng, const HarnessOptions& options = {});

// Exact probability of the differentiating event for a pair produced by
// MakeBoundaryNeighbors with the matching mechanism. Gumbel requires k ==
// kbar. Stream probabilities come from a recursive quadrature over the p-sum
// tree, accurate to about 1e-6.
absl::StatusOr<double> ExactDifferentiatingProbability(
    const NeighborPair& pair, const MechanismConfig& mechanism);

// Ranked outcome of exact or sampled top-k selection; no sentinel.
using Outcome = std::vector<Label>;
using OutcomeDistribution = std::map<Outcome, double>;

inline constexpr size_t kMaxExactItems = 8;

// Exact law of k sequential exponential-mechanism selections without
// replacement, each picking y with probability proportional to
// exp(epsilon * count(y)). Rejects more than kMaxExactItems items or k > |h|.
absl::StatusOr<OutcomeDistribution> ExactExpMechTopKDistribution(
    const Histogram& histogram, int64_t k, double epsilon);

// Empirical law of the one-shot Gumbel mechanism with the threshold disabled
// and kbar = |h|. Requires every count to be positive.
absl::StatusOr<OutcomeDistribution> SampleGumbelTopKDistribution(
    const Histogram& histogram, int64_t k, double epsilon, int64_t samples,
    RandomSource& rng, const HarnessOptions& options = {});

// Half the l1 distance over the union of supports.
double TvDistance(const OutcomeDistribution& p, const OutcomeDistribution& q);

// D_lambda(p || q) = ln(sum p^lambda q^(1 - lambda)) / (lambda - 1), or the
// KL divergence at lambda == 1. Returns +infinity when p puts mass outside the
// support of q. Rejects lambda < 1.
absl::StatusOr<double> RenyiDivergence(const OutcomeDistribution& p,
                                       const OutcomeDistribution& q,
                                       double lambda);

}  // namespace dphist

#endif  // DPHIST_VALIDATION_HARNESS_H_
