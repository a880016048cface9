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

#include "dphist/continual_counter.h"

#include <bit>
#include <cmath>
#include <set>

#include "absl/strings/str_cat.h"
#include "dphist/distributions.h"
#include "dphist/internal/params.h"
#include "dphist/internal/status_macros.h"
#include "dphist/special_functions.h"

namespace dphist {
namespace {

absl::Status ValidateStreamParams(int64_t horizon, int64_t l0, double epsilon,
                                  double delta) {
  if (horizon < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("horizon must be at least 1, got ", horizon, "."));
  }
  if (l0 < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("l0 must be at least 1, got ", l0, "."));
  }
  DPHIST_RETURN_IF_ERROR(internal::ValidateEpsilon(epsilon));
  DPHIST_RETURN_IF_ERROR(internal::ValidateOpenDelta(delta));
  const double tail =
      delta / (static_cast<double>(l0) * static_cast<double>(horizon));
  if (!(tail > 0.0 && tail < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "delta / (l0 * horizon) must lie in (0, 1), got ", tail, "."));
  }
  return absl::OkStatus();
}

}  // namespace

int TreeDepth(int64_t horizon) {
  // 2^m >= horizon + 1 iff m >= bit_width(horizon).
  return static_cast<int>(std::bit_width(static_cast<uint64_t>(horizon)));
}

int ActiveNodeCount(int64_t round) {
  return std::popcount(static_cast<uint64_t>(round));
}

absl::StatusOr<double> CounterThreshold(int64_t horizon, int64_t l0,
                                        double epsilon, double delta) {
  DPHIST_RETURN_IF_ERROR(ValidateStreamParams(horizon, l0, epsilon, delta));
  const double sigma = 1.0 / epsilon;
  const double tail =
      delta / (static_cast<double>(l0) * static_cast<double>(horizon));
  DPHIST_ASSIGN_OR_RETURN(const double lower, NormalInverseCdf(tail));
  return 1.0 - sigma * std::sqrt(TreeDepth(horizon) + 1.0) * lower;
}

absl::StatusOr<CdpBudget> CounterBudget(int64_t horizon, int64_t l0,
                                        double epsilon, double delta) {
  DPHIST_RETURN_IF_ERROR(ValidateStreamParams(horizon, l0, epsilon, delta));
  return CdpBudget::Create(delta, static_cast<double>(l0) *
                                      TreeDepth(horizon) * epsilon * epsilon /
                                      2.0);
}

absl::StatusOr<CounterConfig> CounterConfig::Create(int64_t horizon,
                                                    int64_t l0, double epsilon,
                                                    double delta,
                                                    uint64_t seed) {
  DPHIST_ASSIGN_OR_RETURN(const double threshold,
                          CounterThreshold(horizon, l0, epsilon, delta));
  CounterConfig config;
  config.horizon = horizon;
  config.l0 = l0;
  config.epsilon = epsilon;
  config.delta = delta;
  config.sigma = 1.0 / epsilon;
  config.threshold = threshold;
  config.seed = seed;
  return config;
}

absl::StatusOr<ContinualCounter> ContinualCounter::Create(
    const CounterConfig& config) {
  DPHIST_ASSIGN_OR_RETURN(
      const CdpBudget budget,
      CounterBudget(config.horizon, config.l0, config.epsilon, config.delta));
  DPHIST_RETURN_IF_ERROR(internal::ValidateScaleOverride(config.sigma));
  DPHIST_RETURN_IF_ERROR(internal::ValidateThresholdOverride(config.threshold));
  return ContinualCounter(config, budget);
}

ContinualCounter::ContinualCounter(const CounterConfig& config,
                                   CdpBudget budget)
    : config_(config), budget_(budget), depth_(TreeDepth(config.horizon)) {}

double ContinualCounter::DrawNoise(LabelState& state) const {
  return config_.sigma * internal::UnitGaussian(state.rng.Uniform());
}

double ContinualCounter::PrefixValue(const LabelState& state) const {
  double value = 0.0;
  for (int level = depth_ - 1; level >= 0; --level) {
    if ((round_ >> level) & 1) {
      const Level& node = state.levels[level];
      value += static_cast<double>(node.closed_sum) + node.closed_noise;
    }
  }
  return value;
}

absl::StatusOr<Snapshot> ContinualCounter::Observe(const StreamEvent& event) {
  if (round_ >= config_.horizon) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Stream horizon of ", config_.horizon, " rounds is exhausted."));
  }
  if (event.round != round_ + 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Expected round ", round_ + 1, ", got ", event.round, "."));
  }
  if (static_cast<int64_t>(event.items.size()) > config_.l0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Round ", event.round, " has ", event.items.size(),
        " items; at most l0 = ", config_.l0, " are allowed."));
  }
  const std::set<Label> distinct(event.items.begin(), event.items.end());
  if (distinct.size() != event.items.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Round ", event.round, " repeats an item."));
  }

  const int64_t round = event.round;
  for (const Label& label : distinct) {
    if (labels_.contains(label)) continue;
    LabelState state(RandomSource(config_.seed).Child(label.value()));
    state.first_round = round;
    state.levels.resize(depth_);
    for (int level = 0; level < depth_; ++level) {
      // Level-`level` p-sums that closed strictly before this round.
      const int64_t closed = (round - 1) >> level;
      if (closed == 0) continue;
      Level& node = state.levels[level];
      node.closed_index = closed - 1;
      node.closed_sum = 0;
      node.closed_noise = DrawNoise(state);
    }
    labels_.emplace(label, std::move(state));
  }

  for (const Label& label : distinct) {
    for (Level& node : labels_.at(label).levels) ++node.open_sum;
  }

  round_ = round;
  for (auto& [label, state] : labels_) {
    for (int level = 0; level < depth_; ++level) {
      if (round % (int64_t{1} << level) != 0) continue;
      Level& node = state.levels[level];
      node.closed_index = (round >> level) - 1;
      node.closed_sum = node.open_sum;
      node.closed_noise = DrawNoise(state);
      node.open_sum = 0;
    }
  }

  Snapshot snapshot;
  snapshot.round = round;
  for (const auto& [label, state] : labels_) {
    const double value = PrefixValue(state);
    if (value > config_.threshold) snapshot.items.push_back({label, value});
  }
  return snapshot;
}

std::vector<PartialSumNode> ContinualCounter::ActiveNodes(
    const Label& label) const {
  std::vector<PartialSumNode> nodes;
  auto it = labels_.find(label);
  if (it == labels_.end()) return nodes;
  for (int level = depth_ - 1; level >= 0; --level) {
    if ((round_ >> level) & 1) {
      const Level& node = it->second.levels[level];
      nodes.push_back(
          {level, node.closed_index, node.closed_sum, node.closed_noise});
    }
  }
  return nodes;
}

std::optional<double> ContinualCounter::NoisyCount(const Label& label) const {
  auto it = labels_.find(label);
  if (it == labels_.end()) return std::nullopt;
  return PrefixValue(it->second);
}

nlohmann::json ContinualCounter::DumpState() const {
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& [label, state] : labels_) {
    nlohmann::json levels = nlohmann::json::array();
    for (int level = 0; level < depth_; ++level) {
      const Level& node = state.levels[level];
      levels.push_back({{"level", level},
                        {"open_sum", node.open_sum},
                        {"closed_index", node.closed_index},
                        {"closed_sum", node.closed_sum},
                        {"closed_noise", node.closed_noise}});
    }
    labels.push_back({{"label", label.value()},
                      {"first_round", state.first_round},
                      {"levels", std::move(levels)}});
  }
  return {{"config",
           {{"horizon", config_.horizon},
            {"l0", config_.l0},
            {"epsilon", config_.epsilon},
            {"delta", config_.delta},
            {"sigma", config_.sigma},
            {"threshold", config_.threshold},
            {"seed", config_.seed}}},
          {"depth", depth_},
          {"round", round_},
          {"budget", ToJson(budget_)},
          {"labels", std::move(labels)}};
}

}  // namespace dphist
