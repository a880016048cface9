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

#include "dphist/validation_harness.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dphist/internal/params.h"
#include "dphist/internal/status_macros.h"
#include "dphist/special_functions.h"

namespace dphist {
namespace {

constexpr int64_t kShardSize = 1 << 14;

// Labels "a".."y", then "n25", "n26", ... so that "z" stays free for the
// common item.
Label ItemLabel(int64_t i) {
  if (i < 25) return *Label::Create(std::string(1, static_cast<char>('a' + i)));
  return *Label::Create(absl::StrCat("n", i));
}

// Runs `trials` trials split into fixed shards; shard s uses rng.Child(s).
// `run` returns a per-shard result; results are merged in shard order.
template <typename Result>
absl::StatusOr<Result> RunShards(
    int64_t trials, const RandomSource& rng, int threads,
    const std::function<absl::StatusOr<Result>(RandomSource&, int64_t)>& run,
    const std::function<void(Result&, Result&&)>& merge) {
  const int64_t shards = (trials + kShardSize - 1) / kShardSize;
  std::vector<std::optional<absl::StatusOr<Result>>> results(shards);
  auto work = [&](int64_t first, int64_t stride) {
    for (int64_t s = first; s < shards; s += stride) {
      RandomSource child = rng.Child(static_cast<uint64_t>(s));
      const int64_t n = std::min(kShardSize, trials - s * kShardSize);
      results[s] = run(child, n);
    }
  };
  const int workers =
      static_cast<int>(std::clamp<int64_t>(threads, 1, std::max<int64_t>(shards, 1)));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (std::thread& t : pool) t.join();
  }
  Result total{};
  for (auto& r : results) {
    if (!r->ok()) return r->status();
    merge(total, std::move(**r));
  }
  return total;
}

// Labels the neighbor can ever emit: its positive-count entries.
std::set<Label> FeasibleLabels(const Histogram& neighbor) {
  std::set<Label> feasible;
  for (const auto& [label, count] : neighbor) feasible.insert(label);
  return feasible;
}

bool AnyInfeasible(const std::vector<NoisyCount>& items,
                   const std::set<Label>& feasible) {
  for (const NoisyCount& item : items) {
    if (!feasible.contains(item.label)) return true;
  }
  return false;
}

// Probability that none of the given standardized margins is exceeded when
// each item is compared with a shared N(0, 1) threshold offset:
// E_Z[prod_j Phi(x_j + Z)].
double SharedGaussianNoneProbability(const std::vector<double>& margins) {
  constexpr int kPoints = 40001;
  constexpr double kRange = 12.0;
  const double h = 2.0 * kRange / (kPoints - 1);
  double total = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double z = -kRange + i * h;
    double prod = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    for (double x : margins) prod *= NormalCdf(x + z);
    total += (i == 0 || i == kPoints - 1 ? 0.5 : 1.0) * prod;
  }
  return total * h;
}

// Per-label probability that a count-one label debuting at `debut` is never
// released in rounds [debut, horizon]: noisy prefix noise must stay <= t at
// every such round. Released at round r iff the sum of the noises of the
// closed p-sums covering [1, r] exceeds t.
class StreamTreeQuadrature {
 public:
  StreamTreeQuadrature(int64_t horizon, int64_t debut, double sigma, double t)
      : horizon_(horizon), debut_(debut), sigma_(sigma), t_(t) {
    depth_ = TreeDepth(horizon);
    h_ = sigma / 100.0;
    const double reach = 12.0 * sigma * std::sqrt(depth_ + 1.0);
    const double lo = std::min(0.0, t) - reach;
    const double hi = std::max(0.0, t) + reach;
    origin_ = static_cast<int64_t>(std::ceil((t - lo) / h_));
    n_ = origin_ + static_cast<int64_t>(std::ceil((hi - t) / h_)) + 1;
    const int64_t half = static_cast<int64_t>(std::ceil(9.0 * sigma / h_));
    double sum = 0.0;
    for (int64_t k = -half; k <= half; ++k) {
      const double x = k * h_ / sigma;
      kernel_.push_back(std::exp(-0.5 * x * x));
      sum += kernel_.back();
    }
    for (double& w : kernel_) w /= sum;
    half_ = half;
  }

  double NeverReleased() {
    std::optional<std::vector<double>> root = Solve(depth_, 0);
    if (!root.has_value()) return 1.0;
    // Linear interpolation at s = 0.
    const double pos = origin_ + (0.0 - t_) / h_;
    const int64_t i = std::clamp<int64_t>(static_cast<int64_t>(std::floor(pos)),
                                          0, n_ - 2);
    const double frac = pos - static_cast<double>(i);
    return (1.0 - frac) * (*root)[i] + frac * (*root)[i + 1];
  }

 private:
  double At(const std::vector<double>& f, int64_t i) const {
    return f[std::clamp<int64_t>(i, 0, n_ - 1)];
  }

  // G(s) = Pr[no release at rounds in this node, excluding its last round,
  // given accumulated offset s]. nullopt means G == 1.
  std::optional<std::vector<double>> Solve(int level, int64_t index) {
    if (level == 0) return std::nullopt;
    const int64_t a = index * (int64_t{1} << level) + 1;
    const int64_t b = (index + 1) * (int64_t{1} << level);
    const int64_t from = std::max(a, debut_);
    const int64_t to = std::min(b - 1, horizon_);
    if (from > to) return std::nullopt;
    std::optional<std::vector<double>> left = Solve(level - 1, 2 * index);
    std::optional<std::vector<double>> right = Solve(level - 1, 2 * index + 1);
    const int64_t mid = a + (int64_t{1} << (level - 1)) - 1;
    const bool check_mid = mid >= debut_ && mid <= horizon_;
    std::vector<double> f(n_);
    for (int64_t i = 0; i < n_; ++i) {
      double v = right.has_value() ? (*right)[i] : 1.0;
      if (check_mid) {
        if (i > origin_) v = 0.0;
        if (i == origin_) v *= 0.5;
      }
      f[i] = v;
    }
    std::vector<double> g(n_);
    for (int64_t i = 0; i < n_; ++i) {
      double conv = 0.0;
      for (int64_t k = -half_; k <= half_; ++k) {
        conv += kernel_[k + half_] * At(f, i + k);
      }
      g[i] = (left.has_value() ? (*left)[i] : 1.0) * conv;
    }
    return g;
  }

  int64_t horizon_;
  int64_t debut_;
  double sigma_;
  double t_;
  int depth_ = 0;
  double h_ = 0.0;
  int64_t origin_ = 0;
  int64_t n_ = 0;
  int64_t half_ = 0;
  std::vector<double> kernel_;
};

absl::StatusOr<DeltaEstimate> EstimateHistogram(
    const HistogramNeighborPair& pair, const MechanismConfig& mechanism,
    int64_t trials, RandomSource& rng, const HarnessOptions& options) {
  const std::set<Label> feasible = FeasibleLabels(pair.neighbor);
  std::function<absl::StatusOr<int64_t>(RandomSource&, int64_t)> run;

  if (const auto* m = std::get_if<UnknownDomainMechanism>(&mechanism)) {
    DPHIST_ASSIGN_OR_RETURN(const SensitivityBound sens,
                            SensitivityBound::Create(m->l0, m->linf));
    run = [&pair, &feasible, m, sens](RandomSource& shard,
                                      int64_t n) -> absl::StatusOr<int64_t> {
      int64_t hits = 0;
      for (int64_t i = 0; i < n; ++i) {
        DPHIST_ASSIGN_OR_RETURN(
            const ReleaseReport report,
            ReleaseUnknownDomain(pair.base, sens, m->noise, m->epsilon,
                                 m->delta, shard, m->options));
        if (AnyInfeasible(report.items, feasible)) ++hits;
      }
      return hits;
    };
  } else if (const auto* m = std::get_if<TopKMechanism>(&mechanism)) {
    DPHIST_ASSIGN_OR_RETURN(const SensitivityBound sens,
                            SensitivityBound::Create(m->l0, m->linf));
    DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram truncated,
                            TruncateTopK(pair.base, m->kbar));
    DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram neighbor_top,
                            TruncateTopK(pair.neighbor, m->kbar));
    std::set<Label> top_feasible;
    for (const auto& [label, count] : neighbor_top.top) {
      if (!label.is_sentinel()) top_feasible.insert(label);
    }
    run = [truncated, top_feasible, m, sens](
              RandomSource& shard, int64_t n) -> absl::StatusOr<int64_t> {
      int64_t hits = 0;
      for (int64_t i = 0; i < n; ++i) {
        DPHIST_ASSIGN_OR_RETURN(const ReleaseReport report,
                                ReleaseTopK(truncated, sens, m->epsilon,
                                            m->delta, shard, m->options));
        if (AnyInfeasible(report.items, top_feasible)) ++hits;
      }
      return hits;
    };
  } else if (const auto* m = std::get_if<GumbelMechanism>(&mechanism)) {
    DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram truncated,
                            TruncateTopK(pair.base, m->kbar));
    DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram neighbor_top,
                            TruncateTopK(pair.neighbor, m->kbar));
    std::set<Label> top_feasible;
    for (const auto& [label, count] : neighbor_top.top) {
      if (!label.is_sentinel() && count > 0) top_feasible.insert(label);
    }
    if (m->k > m->kbar) {
      return absl::InvalidArgumentError("k must not exceed kbar.");
    }
    run = [truncated, top_feasible, m](RandomSource& shard,
                                       int64_t n) -> absl::StatusOr<int64_t> {
      int64_t hits = 0;
      for (int64_t i = 0; i < n; ++i) {
        DPHIST_ASSIGN_OR_RETURN(
            const GumbelTopKResult result,
            ReleaseGumbelTopK(truncated, m->k, m->l0_for_threshold, m->epsilon,
                              m->delta, shard, m->options));
        for (const Label& label : result.ranking.items) {
          if (!label.is_sentinel() && !top_feasible.contains(label)) {
            ++hits;
            break;
          }
        }
      }
      return hits;
    };
  } else {
    return absl::InvalidArgumentError(
        "A stream mechanism needs a stream neighbor pair.");
  }

  DPHIST_ASSIGN_OR_RETURN(
      const int64_t hits,
      RunShards<int64_t>(trials, rng, options.threads, run,
                         [](int64_t& a, int64_t&& b) { a += b; }));
  DeltaEstimate estimate;
  estimate.hits = hits;
  estimate.trials = trials;
  estimate.point = static_cast<double>(hits) / static_cast<double>(trials);
  estimate.upper = WilsonUpperBound(hits, trials);
  return estimate;
}

absl::StatusOr<DeltaEstimate> EstimateStream(const StreamNeighborPair& pair,
                                             const MechanismConfig& mechanism,
                                             int64_t trials, RandomSource& rng,
                                             const HarnessOptions& options) {
  const auto* m = std::get_if<StreamMechanism>(&mechanism);
  if (m == nullptr) {
    return absl::InvalidArgumentError(
        "A stream neighbor pair needs a stream mechanism.");
  }
  // Labels the neighbor has seen by each round.
  std::vector<std::set<Label>> feasible(pair.neighbor.size());
  std::set<Label> seen;
  for (size_t r = 0; r < pair.neighbor.size(); ++r) {
    seen.insert(pair.neighbor[r].items.begin(), pair.neighbor[r].items.end());
    feasible[r] = seen;
  }
  DPHIST_RETURN_IF_ERROR(ContinualCounter::Create(m->config).status());

  std::function<absl::StatusOr<int64_t>(RandomSource&, int64_t)> run =
      [&pair, &feasible, m](RandomSource& shard,
                            int64_t n) -> absl::StatusOr<int64_t> {
    int64_t hits = 0;
    for (int64_t i = 0; i < n; ++i) {
      CounterConfig config = m->config;
      config.seed = shard.NextBits();
      DPHIST_ASSIGN_OR_RETURN(ContinualCounter counter,
                              ContinualCounter::Create(config));
      for (size_t r = 0; r < pair.base.size(); ++r) {
        DPHIST_ASSIGN_OR_RETURN(const Snapshot snapshot,
                                counter.Observe(pair.base[r]));
        if (AnyInfeasible(snapshot.items, feasible[r])) {
          ++hits;
          break;
        }
      }
    }
    return hits;
  };
  DPHIST_ASSIGN_OR_RETURN(
      const int64_t hits,
      RunShards<int64_t>(trials, rng, options.threads, run,
                         [](int64_t& a, int64_t&& b) { a += b; }));
  DeltaEstimate estimate;
  estimate.hits = hits;
  estimate.trials = trials;
  estimate.point = static_cast<double>(hits) / static_cast<double>(trials);
  estimate.upper = WilsonUpperBound(hits, trials);
  return estimate;
}

double LaplaceSurvival(double x) {
  return x >= 0.0 ? 0.5 * std::exp(-x) : 1.0 - 0.5 * std::exp(x);
}

// Pr[noise > margin] for zero-scale noise is 1 iff margin < 0.
double Exceeds(double margin, double scale,
               const std::function<double(double)>& survival) {
  if (scale == 0.0) return margin < 0.0 ? 1.0 : 0.0;
  return survival(margin / scale);
}

absl::StatusOr<double> ExactHistogram(const HistogramNeighborPair& pair,
                                      const MechanismConfig& mechanism) {
  const std::set<Label> feasible = FeasibleLabels(pair.neighbor);
  if (const auto* m = std::get_if<UnknownDomainMechanism>(&mechanism)) {
    DPHIST_ASSIGN_OR_RETURN(const SensitivityBound sens,
                            SensitivityBound::Create(m->l0, m->linf));
    DPHIST_ASSIGN_OR_RETURN(
        double threshold,
        UnknownDomainThreshold(m->noise, sens, m->epsilon, m->delta));
    if (m->options.threshold_override) threshold = *m->options.threshold_override;
    const double scale =
        m->options.noise_scale_override.value_or(m->linf / m->epsilon);
    const std::function<double(double)> survival =
        m->noise == NoiseKind::kLaplace ? LaplaceSurvival : NormalSurvival;
    double log_none = 0.0;
    for (const auto& [label, count] : pair.base) {
      if (feasible.contains(label)) continue;
      const double p =
          Exceeds(threshold - static_cast<double>(count), scale, survival);
      log_none += std::log1p(-p);
    }
    return -std::expm1(log_none);
  }
  if (const auto* m = std::get_if<TopKMechanism>(&mechanism)) {
    DPHIST_ASSIGN_OR_RETURN(const SensitivityBound sens,
                            SensitivityBound::Create(m->l0, m->linf));
    DPHIST_ASSIGN_OR_RETURN(double threshold,
                            TopKThreshold(sens, m->epsilon, m->delta));
    if (m->options.threshold_override) threshold = *m->options.threshold_override;
    const double sigma =
        m->options.sigma_override.value_or(m->linf / m->epsilon);
    DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram base,
                            TruncateTopK(pair.base, m->kbar));
    DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram neighbor,
                            TruncateTopK(pair.neighbor, m->kbar));
    std::set<Label> top_feasible;
    for (const auto& [label, count] : neighbor.top) top_feasible.insert(label);
    std::vector<double> margins;
    for (const auto& [label, count] : base.top) {
      if (label.is_sentinel() || top_feasible.contains(label)) continue;
      margins.push_back(threshold + static_cast<double>(base.next_count) -
                        static_cast<double>(count));
    }
    if (margins.empty()) return 0.0;
    if (sigma == 0.0) {
      for (double x : margins) {
        if (x < 0.0) return 1.0;
      }
      return 0.0;
    }
    for (double& x : margins) x /= sigma;
    if (margins.size() == 1) return NormalSurvival(margins[0] / std::sqrt(2.0));
    return 1.0 - SharedGaussianNoneProbability(margins);
  }
  if (const auto* m = std::get_if<GumbelMechanism>(&mechanism)) {
    if (m->k != m->kbar) {
      return absl::UnimplementedError(
          "The exact Gumbel probability needs k == kbar.");
    }
    DPHIST_ASSIGN_OR_RETURN(
        double threshold,
        GumbelThreshold(m->l0_for_threshold, m->epsilon, m->delta));
    if (m->options.threshold_override) threshold = *m->options.threshold_override;
    const double beta = 1.0 / m->epsilon;
    DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram base,
                            TruncateTopK(pair.base, m->kbar));
    DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram neighbor,
                            TruncateTopK(pair.neighbor, m->kbar));
    std::set<Label> top_feasible;
    for (const auto& [label, count] : neighbor.top) {
      if (count > 0) top_feasible.insert(label);
    }
    // With k == kbar every survivor is listed, so the event is "some
    // infeasible item beats the noisy threshold". Conditioned on the
    // threshold Gumbel, exp(-G0 / beta) ~ Exp(1), giving
    // Pr[none] = 1 / (1 + sum_j exp(-(T + next - c_j) / beta)).
    double rate = 0.0;
    for (const auto& [label, count] : base.top) {
      if (count <= 0 || top_feasible.contains(label)) continue;
      rate += std::exp(-(threshold + static_cast<double>(base.next_count) -
                         static_cast<double>(count)) /
                       beta);
    }
    if (std::isinf(rate)) return 1.0;
    return rate / (1.0 + rate);
  }
  return absl::InvalidArgumentError(
      "A stream mechanism needs a stream neighbor pair.");
}

absl::StatusOr<double> ExactStream(const StreamNeighborPair& pair,
                                   const MechanismConfig& mechanism) {
  const auto* m = std::get_if<StreamMechanism>(&mechanism);
  if (m == nullptr) {
    return absl::InvalidArgumentError(
        "A stream neighbor pair needs a stream mechanism.");
  }
  std::set<Label> neighbor_labels;
  for (const StreamEvent& e : pair.neighbor) {
    neighbor_labels.insert(e.items.begin(), e.items.end());
  }
  std::map<Label, std::vector<int64_t>> fresh;
  for (const StreamEvent& e : pair.base) {
    for (const Label& label : e.items) {
      if (!neighbor_labels.contains(label)) fresh[label].push_back(e.round);
    }
  }
  if (fresh.empty()) return 0.0;
  for (const auto& [label, rounds] : fresh) {
    if (rounds.size() != 1 || rounds[0] != pair.differing_round) {
      return absl::UnimplementedError(
          "The exact stream probability needs labels that appear only at the "
          "differing round.");
    }
  }
  const CounterConfig& config = m->config;
  const double t = config.threshold - 1.0;
  double none;
  if (config.sigma == 0.0) {
    none = t < 0.0 ? 0.0 : 1.0;
  } else if (std::isinf(t)) {
    none = t > 0.0 ? 1.0 : 0.0;
  } else {
    StreamTreeQuadrature quadrature(config.horizon, pair.differing_round,
                                    config.sigma, t);
    none = std::clamp(quadrature.NeverReleased(), 0.0, 1.0);
  }
  return 1.0 - std::pow(none, static_cast<double>(fresh.size()));
}

void EnumerateExpMech(const std::vector<std::pair<Label, double>>& weights,
                      std::vector<bool>& used, int64_t k, double mass,
                      Outcome& prefix, OutcomeDistribution& out) {
  if (static_cast<int64_t>(prefix.size()) == k) {
    out[prefix] += mass;
    return;
  }
  double total = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!used[i]) total += weights[i].second;
  }
  for (size_t i = 0; i < weights.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    prefix.push_back(weights[i].first);
    EnumerateExpMech(weights, used, k, mass * weights[i].second / total,
                     prefix, out);
    prefix.pop_back();
    used[i] = false;
  }
}

}  // namespace

absl::Status ValidateNeighborPair(const HistogramNeighborPair& pair,
                                  const SensitivityBound& sens) {
  int64_t changed = 0;
  for (const auto& [label, count] : pair.neighbor) {
    if (!pair.base.contains(label)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Label '", label.value(), "' is only in the neighbor."));
    }
  }
  for (const auto& [label, count] : pair.base) {
    const int64_t other = pair.neighbor.Count(label).value_or(0);
    if (other > count) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Count of '", label.value(), "' grows in the neighbor."));
    }
    if (other == count) continue;
    if (static_cast<double>(count - other) > sens.linf()) {
      return absl::InvalidArgumentError(
          absl::StrCat("Count of '", label.value(), "' drops by ",
                       count - other, ", more than linf = ", sens.linf(), "."));
    }
    ++changed;
  }
  if (sens.l0_bounded() && changed > sens.l0()) {
    return absl::InvalidArgumentError(absl::StrCat(
        changed, " labels change, more than l0 = ", sens.l0(), "."));
  }
  return absl::OkStatus();
}

absl::Status ValidateNeighborPair(const StreamNeighborPair& pair, int64_t l0) {
  if (pair.base.size() != pair.neighbor.size()) {
    return absl::InvalidArgumentError("Streams have different lengths.");
  }
  int differing = 0;
  for (size_t r = 0; r < pair.base.size(); ++r) {
    const int64_t round = static_cast<int64_t>(r) + 1;
    if (pair.base[r].round != round || pair.neighbor[r].round != round) {
      return absl::InvalidArgumentError(
          absl::StrCat("Event ", r, " is not round ", round, "."));
    }
    for (const auto* e : {&pair.base[r], &pair.neighbor[r]}) {
      if (static_cast<int64_t>(e->items.size()) > l0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "Round ", round, " has more than l0 = ", l0, " items."));
      }
    }
    if (pair.base[r].items == pair.neighbor[r].items) continue;
    ++differing;
    if (round != pair.differing_round || !pair.neighbor[r].items.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Round ", round,
          " differs but is not an empty neighbor event at the differing "
          "round."));
    }
  }
  if (differing != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("Streams differ in ", differing, " rounds, expected 1."));
  }
  return absl::OkStatus();
}

absl::StatusOr<NeighborPair> MakeBoundaryNeighbors(absl::string_view mechanism,
                                                   const BoundaryShape& shape) {
  auto whole_linf = [&]() -> absl::StatusOr<int64_t> {
    if (!(shape.linf >= 1.0) || shape.linf != std::floor(shape.linf) ||
        shape.linf > 1e15) {
      return absl::InvalidArgumentError(absl::StrCat(
          "linf must be a positive whole number, got ", shape.linf, "."));
    }
    return static_cast<int64_t>(shape.linf);
  };
  auto positive = [](int64_t v, absl::string_view name) -> absl::Status {
    if (v < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat(name, " must be at least 1, got ", v, "."));
    }
    return absl::OkStatus();
  };

  if (mechanism == "alg1") {
    DPHIST_RETURN_IF_ERROR(positive(shape.l0, "l0"));
    DPHIST_ASSIGN_OR_RETURN(const int64_t linf, whole_linf());
    HistogramNeighborPair pair;
    for (int64_t i = 0; i < shape.l0; ++i) {
      DPHIST_RETURN_IF_ERROR(pair.base.Insert(ItemLabel(i), linf));
    }
    if (shape.common_count > 0) {
      const Label z = *Label::Create("z");
      DPHIST_RETURN_IF_ERROR(pair.base.Insert(z, shape.common_count));
      DPHIST_RETURN_IF_ERROR(pair.neighbor.Insert(z, shape.common_count));
    }
    pair.description = absl::StrCat("alg1 boundary: ", shape.l0,
                                    " labels at count ", linf, " vanish");
    return pair;
  }
  if (mechanism == "topk") {
    DPHIST_RETURN_IF_ERROR(positive(shape.l0, "l0"));
    DPHIST_RETURN_IF_ERROR(positive(shape.kbar, "kbar"));
    DPHIST_ASSIGN_OR_RETURN(const int64_t linf, whole_linf());
    if (shape.l0 > shape.kbar) {
      return absl::InvalidArgumentError("topk boundary needs l0 <= kbar.");
    }
    constexpr int64_t kFillerCount = 10;
    HistogramNeighborPair pair;
    for (int64_t i = 0; i < shape.kbar; ++i) {
      const Label filler = *Label::Create(absl::StrCat("a", i));
      DPHIST_RETURN_IF_ERROR(pair.base.Insert(filler, kFillerCount));
      DPHIST_RETURN_IF_ERROR(pair.neighbor.Insert(filler, kFillerCount));
    }
    for (int64_t i = 0; i < shape.l0; ++i) {
      const Label item = *Label::Create(absl::StrCat("b", i));
      DPHIST_RETURN_IF_ERROR(pair.base.Insert(item, kFillerCount + linf));
      DPHIST_RETURN_IF_ERROR(pair.neighbor.Insert(item, kFillerCount));
    }
    pair.description = absl::StrCat("topk boundary: ", shape.l0,
                                    " items fall out of the top ", shape.kbar);
    return pair;
  }
  if (mechanism == "gumbel") {
    DPHIST_RETURN_IF_ERROR(positive(shape.kbar, "kbar"));
    constexpr int64_t kItemCount = 10;
    HistogramNeighborPair pair;
    for (int64_t i = 0; i < shape.kbar; ++i) {
      const Label filler = *Label::Create(absl::StrCat("a", i));
      DPHIST_RETURN_IF_ERROR(pair.base.Insert(filler, kItemCount - 1));
      DPHIST_RETURN_IF_ERROR(pair.neighbor.Insert(filler, kItemCount - 1));
      const Label item = *Label::Create(absl::StrCat("b", i));
      DPHIST_RETURN_IF_ERROR(pair.base.Insert(item, kItemCount));
      DPHIST_RETURN_IF_ERROR(pair.neighbor.Insert(item, kItemCount - 1));
    }
    pair.description = absl::StrCat("gumbel boundary: ", shape.kbar,
                                    " items fall out of the top ", shape.kbar);
    return pair;
  }
  if (mechanism == "stream") {
    DPHIST_RETURN_IF_ERROR(positive(shape.l0, "l0"));
    DPHIST_RETURN_IF_ERROR(positive(shape.horizon, "horizon"));
    if (shape.debut_round < 1 || shape.debut_round > shape.horizon) {
      return absl::InvalidArgumentError(
          absl::StrCat("debut_round must lie in [1, horizon], got ",
                       shape.debut_round, "."));
    }
    StreamNeighborPair pair;
    pair.differing_round = shape.debut_round;
    const Label common = *Label::Create("z");
    for (int64_t round = 1; round <= shape.horizon; ++round) {
      StreamEvent base{round, {}};
      StreamEvent neighbor{round, {}};
      if (round == shape.debut_round) {
        for (int64_t i = 0; i < shape.l0; ++i) base.items.push_back(ItemLabel(i));
      } else {
        base.items.push_back(common);
        neighbor.items.push_back(common);
      }
      pair.base.push_back(std::move(base));
      pair.neighbor.push_back(std::move(neighbor));
    }
    pair.description =
        absl::StrCat("stream boundary: ", shape.l0, " labels debut at round ",
                     shape.debut_round, " of ", shape.horizon);
    return pair;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "Unknown mechanism '", mechanism,
      "'; expected alg1, topk, gumbel or stream."));
}

double WilsonUpperBound(int64_t hits, int64_t trials, double confidence) {
  if (trials <= 0) return 1.0;
  const double z = internal::NormalQuantile(confidence);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double center = p + z2 / (2.0 * n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::min(1.0, (center + spread) / (1.0 + z2 / n));
}

absl::StatusOr<DeltaEstimate> EstimateDeltaEvent(
    const NeighborPair& pair, const MechanismConfig& mechanism, int64_t trials,
    RandomSource& rng, const HarnessOptions& options) {
  if (trials < kMinDeltaTrials) {
    return absl::InvalidArgumentError(absl::StrCat(
        "trials must be at least ", kMinDeltaTrials, ", got ", trials, "."));
  }
  if (const auto* p = std::get_if<HistogramNeighborPair>(&pair)) {
    return EstimateHistogram(*p, mechanism, trials, rng, options);
  }
  return EstimateStream(std::get<StreamNeighborPair>(pair), mechanism, trials,
                        rng, options);
}

absl::StatusOr<double> ExactDifferentiatingProbability(
    const NeighborPair& pair, const MechanismConfig& mechanism) {
  if (const auto* p = std::get_if<HistogramNeighborPair>(&pair)) {
    return ExactHistogram(*p, mechanism);
  }
  return ExactStream(std::get<StreamNeighborPair>(pair), mechanism);
}

absl::StatusOr<OutcomeDistribution> ExactExpMechTopKDistribution(
    const Histogram& histogram, int64_t k, double epsilon) {
  DPHIST_RETURN_IF_ERROR(internal::ValidateEpsilon(epsilon));
  if (histogram.size() > kMaxExactItems) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Exact enumeration supports at most ", kMaxExactItems, " items."));
  }
  if (k < 1 || k > static_cast<int64_t>(histogram.size())) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must lie in [1, ", histogram.size(), "], got ", k,
                     "."));
  }
  int64_t max_count = 0;
  for (const auto& [label, count] : histogram) {
    max_count = std::max(max_count, count);
  }
  std::vector<std::pair<Label, double>> weights;
  for (const auto& [label, count] : histogram) {
    weights.emplace_back(
        label, std::exp(epsilon * static_cast<double>(count - max_count)));
  }
  std::vector<bool> used(weights.size(), false);
  Outcome prefix;
  OutcomeDistribution out;
  EnumerateExpMech(weights, used, k, 1.0, prefix, out);
  return out;
}

absl::StatusOr<OutcomeDistribution> SampleGumbelTopKDistribution(
    const Histogram& histogram, int64_t k, double epsilon, int64_t samples,
    RandomSource& rng, const HarnessOptions& options) {
  DPHIST_RETURN_IF_ERROR(internal::ValidateEpsilon(epsilon));
  if (samples < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("samples must be at least 1, got ", samples, "."));
  }
  for (const auto& [label, count] : histogram) {
    if (count <= 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Count of '", label.value(), "' must be positive."));
    }
  }
  const int64_t kbar = static_cast<int64_t>(histogram.size());
  if (k < 1 || k > kbar) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must lie in [1, ", kbar, "], got ", k, "."));
  }
  DPHIST_ASSIGN_OR_RETURN(const TruncatedHistogram truncated,
                          TruncateTopK(histogram, kbar));
  GumbelTopKOptions gumbel_options;
  gumbel_options.threshold_override = -std::numeric_limits<double>::infinity();
  // Delta only enters the threshold, which is disabled.
  constexpr double kUnusedDelta = 0.5;

  using Counts = std::map<Outcome, int64_t>;
  std::function<absl::StatusOr<Counts>(RandomSource&, int64_t)> run =
      [&](RandomSource& shard, int64_t n) -> absl::StatusOr<Counts> {
    Counts counts;
    for (int64_t i = 0; i < n; ++i) {
      DPHIST_ASSIGN_OR_RETURN(
          GumbelTopKResult result,
          ReleaseGumbelTopK(truncated, k, 1, epsilon, kUnusedDelta, shard,
                            gumbel_options));
      ++counts[std::move(result.ranking.items)];
    }
    return counts;
  };
  DPHIST_ASSIGN_OR_RETURN(
      const Counts counts,
      RunShards<Counts>(samples, rng, options.threads, run,
                        [](Counts& a, Counts&& b) {
                          for (auto& [outcome, n] : b) a[outcome] += n;
                        }));
  OutcomeDistribution out;
  for (const auto& [outcome, n] : counts) {
    out[outcome] = static_cast<double>(n) / static_cast<double>(samples);
  }
  return out;
}

double TvDistance(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  double total = 0.0;
  for (const auto& [outcome, mass] : p) {
    auto it = q.find(outcome);
    total += std::abs(mass - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [outcome, mass] : q) {
    if (!p.contains(outcome)) total += mass;
  }
  return 0.5 * total;
}

absl::StatusOr<double> RenyiDivergence(const OutcomeDistribution& p,
                                       const OutcomeDistribution& q,
                                       double lambda) {
  if (!(lambda >= 1.0) || std::isinf(lambda)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must be finite and at least 1, got ", lambda,
                     "."));
  }
  std::vector<double> log_terms;
  double kl = 0.0;
  for (const auto& [outcome, mass] : p) {
    if (mass <= 0.0) continue;
    auto it = q.find(outcome);
    if (it == q.end() || it->second <= 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    const double lp = std::log(mass);
    const double lq = std::log(it->second);
    if (lambda == 1.0) {
      kl += mass * (lp - lq);
    } else {
      log_terms.push_back(lambda * lp + (1.0 - lambda) * lq);
    }
  }
  if (lambda == 1.0) return kl;
  if (log_terms.empty()) return 0.0;
  const double peak = *std::max_element(log_terms.begin(), log_terms.end());
  double sum = 0.0;
  for (double t : log_terms) sum += std::exp(t - peak);
  return (peak + std::log(sum)) / (lambda - 1.0);
}

}  // namespace dphist
