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

#ifndef DPHIST_CONTINUAL_COUNTER_H_
#define DPHIST_CONTINUAL_COUNTER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dphist/accountant.h"
#include "dphist/random_source.h"
#include "dphist/types.h"
#include "json.hpp"

namespace dphist {

// ceil(log2(horizon + 1)): the number of dyadic levels, and the most p-sums
// any single round belongs to.
int TreeDepth(int64_t horizon);

// Number of p-sums that make up the prefix [1, round]: popcount(round).
int ActiveNodeCount(int64_t round);

// T = 1 + sigma * sqrt(depth + 1) * PhiInverse(1 - delta / (l0 * horizon)),
// with sigma = 1 / epsilon.
absl::StatusOr<double> CounterThreshold(int64_t horizon, int64_t l0,
                                        double epsilon, double delta);

// (delta, l0 * depth * epsilon^2 / 2) over the whole stream.
absl::StatusOr<CdpBudget> CounterBudget(int64_t horizon, int64_t l0,
                                        double epsilon, double delta);

struct CounterConfig {
  // Derives sigma and threshold from (epsilon, delta).
  static absl::StatusOr<CounterConfig> Create(int64_t horizon, int64_t l0,
                                              double epsilon, double delta,
                                              uint64_t seed);

  int64_t horizon = 0;
  int64_t l0 = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  // Tests may overwrite sigma (zero allowed) and threshold after Create();
  // the reported budget still follows epsilon.
  double sigma = 0.0;
  double threshold = 0.0;
  uint64_t seed = 0;
};

struct StreamEvent {
  int64_t round = 0;
  // At most l0 distinct labels.
  std::vector<Label> items;
};

struct Snapshot {
  int64_t round = 0;
  // Labels whose noisy prefix count exceeds the threshold, in label order.
  std::vector<NoisyCount> items;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

// One p-sum: the dyadic interval [index * 2^level + 1, (index + 1) * 2^level].
struct PartialSumNode {
  int level = 0;
  int64_t index = 0;
  int64_t partial_sum = 0;
  double noise = 0.0;
};

// Running per-label counter over a stream of item sets, releasing every
// round the labels whose noisy prefix count exceeds a fixed threshold.
//
// Each label keeps, per level, the p-sum still being filled and the most
// recently closed p-sum with its noise; the prefix [1, r] is the sum of the
// closed p-sums at the set bits of r. Noise for a (label, p-sum) pair is drawn
// exactly once, when the p-sum closes, from a child stream seeded by
// (seed, label). A label first seen at round r draws fresh noise for every
// p-sum that closed before r, in ascending level order.
//
// Single writer: Observe() calls must be serialized.
class ContinualCounter {
 public:
  static absl::StatusOr<ContinualCounter> Create(const CounterConfig& config);

  // Rejects, without changing state, an event whose round is not
  // round() + 1, that exceeds the horizon, or that has more than l0 items or
  // a repeated item.
  absl::StatusOr<Snapshot> Observe(const StreamEvent& event);

  int64_t round() const { return round_; }
  const CounterConfig& config() const { return config_; }
  const CdpBudget& budget() const { return budget_; }

  // Testing hooks.
  //
  // The p-sums that make up the current prefix for `label`, highest level
  // first.
  std::vector<PartialSumNode> ActiveNodes(const Label& label) const;
  // The unthresholded noisy prefix count for `label` at the current round.
  std::optional<double> NoisyCount(const Label& label) const;

  // Full in-memory state: config, round, and every label's p-sums and noises.
  nlohmann::json DumpState() const;

 private:
  struct Level {
    int64_t open_sum = 0;
    // Index -1 until a level-`l` p-sum has closed.
    int64_t closed_index = -1;
    int64_t closed_sum = 0;
    double closed_noise = 0.0;
  };
  struct LabelState {
    explicit LabelState(RandomSource source) : rng(std::move(source)) {}
    RandomSource rng;
    int64_t first_round = 0;
    std::vector<Level> levels;
  };

  ContinualCounter(const CounterConfig& config, CdpBudget budget);

  double PrefixValue(const LabelState& state) const;
  double DrawNoise(LabelState& state) const;

  CounterConfig config_;
  CdpBudget budget_;
  int depth_ = 0;
  int64_t round_ = 0;
  std::map<Label, LabelState> labels_;
};

}  // namespace dphist

#endif  // DPHIST_CONTINUAL_COUNTER_H_
