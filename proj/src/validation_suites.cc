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

#include "dphist/validation_suites.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dphist/internal/status_macros.h"
#include "dphist/validation_harness.h"

namespace dphist {
namespace {

using nlohmann::json;

constexpr double kDelta = 0.05;
constexpr double kAbsoluteSlack = 0.004;
constexpr double kStandardErrors = 5.0;
constexpr double kUpperFactor = 1.2;
// Floating-point slack for exact comparisons.
constexpr double kArithmeticSlack = 1e-12;

Histogram MakeHistogram(
    std::initializer_list<std::pair<std::string, int64_t>> pairs) {
  return *Histogram::FromPairs(pairs);
}

// Checks one (pair, mechanism) against its oracle, if any, and the delta
// budget.
absl::StatusOr<json> DeltaCheck(const std::string& name,
                                const NeighborPair& pair,
                                const MechanismConfig& mechanism, double delta,
                                const SuiteOptions& options,
                                uint64_t stream) {
  RandomSource rng = RandomSource(options.seed).Child(stream);
  DPHIST_ASSIGN_OR_RETURN(
      const DeltaEstimate estimate,
      EstimateDeltaEvent(pair, mechanism, options.trials, rng,
                         HarnessOptions{options.threads}));
  json check = {{"name", name},
                {"kind", "delta_event"},
                {"delta", delta},
                {"point", estimate.point},
                {"upper", estimate.upper},
                {"hits", estimate.hits},
                {"trials", estimate.trials}};
  bool pass = estimate.upper <= kUpperFactor * delta;
  check["upper_bound"] = kUpperFactor * delta;
  absl::StatusOr<double> oracle =
      ExactDifferentiatingProbability(pair, mechanism);
  if (oracle.ok()) {
    const double se = std::sqrt(*oracle * (1.0 - *oracle) /
                                static_cast<double>(options.trials));
    const double tolerance = std::max(kAbsoluteSlack, kStandardErrors * se);
    check["oracle"] = *oracle;
    check["tolerance"] = tolerance;
    pass = pass && std::abs(estimate.point - *oracle) <= tolerance &&
           *oracle <= delta + kArithmeticSlack;
  } else if (!absl::IsUnimplemented(oracle.status())) {
    return oracle.status();
  }
  check["pass"] = pass;
  return check;
}

absl::StatusOr<json> RunAlg1(const SuiteOptions& options) {
  json checks = json::array();
  struct Case {
    int64_t l0;
    double linf;
    double epsilon;
  };
  uint64_t stream = 0;
  for (const Case& c : {Case{1, 1.0, 1.0}, Case{3, 2.0, 0.5}}) {
    BoundaryShape shape;
    shape.l0 = c.l0;
    shape.linf = c.linf;
    shape.common_count = 100;
    DPHIST_ASSIGN_OR_RETURN(const NeighborPair pair,
                            MakeBoundaryNeighbors("alg1", shape));
    for (NoiseKind noise : {NoiseKind::kLaplace, NoiseKind::kGaussian}) {
      UnknownDomainMechanism mechanism;
      mechanism.noise = noise;
      mechanism.l0 = c.l0;
      mechanism.linf = c.linf;
      mechanism.epsilon = c.epsilon;
      mechanism.delta = kDelta;
      DPHIST_ASSIGN_OR_RETURN(
          json check,
          DeltaCheck(absl::StrCat("alg1_", NoiseKindName(noise), "_l0=", c.l0,
                                  "_linf=", c.linf, "_eps=", c.epsilon),
                     pair, mechanism, kDelta, options, stream++));
      checks.push_back(std::move(check));
    }
  }
  return checks;
}

absl::StatusOr<json> RunTopK(const SuiteOptions& options) {
  json checks = json::array();
  struct Case {
    int64_t kbar;
    int64_t l0;
    double linf;
    double epsilon;
  };
  uint64_t stream = 0;
  for (const Case& c : {Case{1, 1, 1.0, 1.0}, Case{3, 2, 2.0, 0.5}}) {
    BoundaryShape shape;
    shape.kbar = c.kbar;
    shape.l0 = c.l0;
    shape.linf = c.linf;
    DPHIST_ASSIGN_OR_RETURN(const NeighborPair pair,
                            MakeBoundaryNeighbors("topk", shape));
    TopKMechanism mechanism;
    mechanism.kbar = c.kbar;
    mechanism.l0 = c.l0;
    mechanism.linf = c.linf;
    mechanism.epsilon = c.epsilon;
    mechanism.delta = kDelta;
    DPHIST_ASSIGN_OR_RETURN(
        json check,
        DeltaCheck(absl::StrCat("topk_kbar=", c.kbar, "_l0=", c.l0,
                                "_linf=", c.linf, "_eps=", c.epsilon),
                   pair, mechanism, kDelta, options, stream++));
    checks.push_back(std::move(check));
  }
  return checks;
}

absl::StatusOr<json> RunGumbel(const SuiteOptions& options) {
  json checks = json::array();
  struct Case {
    int64_t k;
    int64_t kbar;
    double epsilon;
  };
  uint64_t stream = 0;
  for (const Case& c : {Case{1, 1, 1.0}, Case{3, 3, 0.5}, Case{1, 3, 1.0}}) {
    BoundaryShape shape;
    shape.kbar = c.kbar;
    DPHIST_ASSIGN_OR_RETURN(const NeighborPair pair,
                            MakeBoundaryNeighbors("gumbel", shape));
    GumbelMechanism mechanism;
    mechanism.k = c.k;
    mechanism.kbar = c.kbar;
    // One user moves kbar counts on this pair.
    mechanism.l0_for_threshold = c.kbar;
    mechanism.epsilon = c.epsilon;
    mechanism.delta = kDelta;
    DPHIST_ASSIGN_OR_RETURN(
        json check, DeltaCheck(absl::StrCat("gumbel_k=", c.k, "_kbar=", c.kbar,
                                            "_eps=", c.epsilon),
                               pair, mechanism, kDelta, options, stream++));
    checks.push_back(std::move(check));
  }

  const int64_t samples = 10 * options.trials;
  const double tolerance = GumbelTvTolerance(samples);
  const std::vector<TopKInstance> corpus = GumbelEquivalenceCorpus();
  for (size_t i = 0; i < corpus.size(); ++i) {
    const TopKInstance& instance = corpus[i];
    DPHIST_ASSIGN_OR_RETURN(const OutcomeDistribution exact,
                            ExactExpMechTopKDistribution(
                                instance.histogram, instance.k,
                                instance.epsilon));
    RandomSource rng = RandomSource(options.seed).Child(1000 + i);
    DPHIST_ASSIGN_OR_RETURN(
        const OutcomeDistribution sampled,
        SampleGumbelTopKDistribution(instance.histogram, instance.k,
                                     instance.epsilon, samples, rng,
                                     HarnessOptions{options.threads}));
    const double tv = TvDistance(sampled, exact);
    checks.push_back({{"name", absl::StrCat("gumbel_expmech_tv_", i)},
                      {"kind", "tv_distance"},
                      {"samples", samples},
                      {"tv", tv},
                      {"tolerance", tolerance},
                      {"pass", tv < tolerance}});
  }
  return checks;
}

absl::StatusOr<json> RunStream(const SuiteOptions& options) {
  json checks = json::array();
  struct Case {
    int64_t horizon;
    int64_t l0;
    int64_t debut;
    double epsilon;
  };
  uint64_t stream = 0;
  for (const Case& c : {Case{4, 2, 2, 1.0}, Case{8, 1, 5, 1.0},
                        Case{16, 3, 1, 2.0}}) {
    BoundaryShape shape;
    shape.l0 = c.l0;
    shape.horizon = c.horizon;
    shape.debut_round = c.debut;
    DPHIST_ASSIGN_OR_RETURN(const NeighborPair pair,
                            MakeBoundaryNeighbors("stream", shape));
    DPHIST_ASSIGN_OR_RETURN(
        const CounterConfig config,
        CounterConfig::Create(c.horizon, c.l0, c.epsilon, kDelta, 0));
    DPHIST_ASSIGN_OR_RETURN(
        json check,
        DeltaCheck(absl::StrCat("stream_L=", c.horizon, "_l0=", c.l0,
                                "_debut=", c.debut, "_eps=", c.epsilon),
                   pair, StreamMechanism{config}, kDelta, options, stream++));
    checks.push_back(std::move(check));
  }
  return checks;
}

absl::StatusOr<json> RunRenyi() {
  json checks = json::array();
  const std::vector<Histogram> bases = {
      MakeHistogram({{"a", 3}, {"b", 2}, {"c", 1}}),
      MakeHistogram({{"a", 2}, {"b", 2}, {"c", 2}, {"d", 1}}),
      MakeHistogram({{"a", 4}, {"b", 3}, {"c", 3}, {"d", 1}, {"e", 1}}),
  };
  for (size_t b = 0; b < bases.size(); ++b) {
    const Histogram& base = bases[b];
    std::vector<Label> labels;
    for (const auto& [label, count] : base) labels.push_back(label);
    const uint32_t subsets = 1u << labels.size();
    for (int64_t k : {1, 2}) {
      for (double epsilon : {0.5, 1.0, 2.0}) {
        DPHIST_ASSIGN_OR_RETURN(const OutcomeDistribution p,
                                ExactExpMechTopKDistribution(base, k, epsilon));
        const double rho = static_cast<double>(k) * epsilon * epsilon / 8.0;
        double worst_ratio = 0.0;
        for (uint32_t mask = 1; mask < subsets; ++mask) {
          Histogram neighbor;
          for (size_t i = 0; i < labels.size(); ++i) {
            const int64_t drop = (mask >> i) & 1;
            DPHIST_RETURN_IF_ERROR(
                neighbor.Insert(labels[i], *base.Count(labels[i]) - drop));
          }
          DPHIST_ASSIGN_OR_RETURN(
              const OutcomeDistribution q,
              ExactExpMechTopKDistribution(neighbor, k, epsilon));
          for (double lambda : {1.5, 2.0, 4.0, 8.0}) {
            DPHIST_ASSIGN_OR_RETURN(const double forward,
                                    RenyiDivergence(p, q, lambda));
            DPHIST_ASSIGN_OR_RETURN(const double backward,
                                    RenyiDivergence(q, p, lambda));
            worst_ratio = std::max(
                worst_ratio, std::max(forward, backward) / (rho * lambda));
          }
        }
        checks.push_back(
            {{"name", absl::StrCat("renyi_base", b, "_k=", k, "_eps=",
                                   epsilon)},
             {"kind", "renyi_budget"},
             {"rho", rho},
             {"worst_divergence_over_rho_lambda", worst_ratio},
             {"pass", worst_ratio <= 1.0 + kArithmeticSlack}});
      }
    }
  }
  return checks;
}

}  // namespace

std::vector<TopKInstance> GumbelEquivalenceCorpus() {
  std::vector<TopKInstance> corpus = {
      {MakeHistogram({{"a", 1}, {"b", 1}}), 1, 1.0},
      {MakeHistogram({{"a", 1}, {"b", 1}}), 2, 2.0},
      {MakeHistogram({{"a", 3}, {"b", 2}, {"c", 1}}), 1, 1.0},
      {MakeHistogram({{"a", 3}, {"b", 2}, {"c", 1}}), 2, 1.0},
      {MakeHistogram({{"a", 3}, {"b", 2}, {"c", 1}}), 3, 0.5},
      {MakeHistogram({{"a", 5}, {"b", 5}, {"c", 5}}), 2, 1.0},
      {MakeHistogram({{"a", 2}, {"b", 1}, {"c", 1}, {"d", 1}}), 1, 2.0},
      {MakeHistogram({{"a", 2}, {"b", 1}, {"c", 1}, {"d", 1}}), 3, 1.0},
      {MakeHistogram({{"a", 10}, {"b", 9}, {"c", 8}, {"d", 7}, {"e", 6}}), 3,
       0.5},
      {MakeHistogram({{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}, {"e", 5}}), 2,
       1.0},
      {MakeHistogram({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 1}}), 3,
       2.0},
      {MakeHistogram({{"x", 4}, {"y", 1}}), 1, 0.5},
      {MakeHistogram({{"x", 4}, {"y", 1}}), 2, 1.0},
      {MakeHistogram({{"a", 7}}), 1, 1.0},
      {MakeHistogram({{"a", 2}, {"b", 3}, {"c", 2}, {"d", 3}}), 2, 0.5},
      {MakeHistogram({{"a", 1}, {"b", 4}, {"c", 2}, {"d", 8}, {"e", 5}}), 1,
       0.5},
      {MakeHistogram({{"a", 1}, {"b", 4}, {"c", 2}, {"d", 8}, {"e", 5}}), 3,
       0.5},
      {MakeHistogram({{"p", 3}, {"q", 3}, {"r", 1}}), 3, 2.0},
      {MakeHistogram({{"a", 6}, {"b", 2}, {"c", 2}, {"d", 1}, {"e", 1}}), 2,
       0.5},
      {MakeHistogram({{"a", 2}, {"b", 2}, {"c", 2}, {"d", 2}}), 1, 1.0},
  };
  return corpus;
}

double GumbelTvTolerance(int64_t samples) {
  constexpr double kTolerance = 0.01;
  constexpr double kReferenceSamples = 1e6;
  return kTolerance *
         std::max(1.0, std::sqrt(kReferenceSamples /
                                 static_cast<double>(std::max<int64_t>(
                                     samples, 1))));
}

absl::StatusOr<json> RunValidationSuite(absl::string_view suite,
                                        const SuiteOptions& options) {
  if (options.trials < kMinDeltaTrials) {
    return absl::InvalidArgumentError(absl::StrCat(
        "trials must be at least ", kMinDeltaTrials, ", got ", options.trials,
        "."));
  }
  absl::StatusOr<json> checks;
  if (suite == "alg1") {
    checks = RunAlg1(options);
  } else if (suite == "topk") {
    checks = RunTopK(options);
  } else if (suite == "gumbel") {
    checks = RunGumbel(options);
  } else if (suite == "stream") {
    checks = RunStream(options);
  } else if (suite == "renyi") {
    checks = RunRenyi();
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("Unknown suite '", suite,
                     "'; expected alg1, topk, gumbel, stream or renyi."));
  }
  if (!checks.ok()) return checks.status();
  bool pass = true;
  for (const json& check : *checks) pass = pass && check["pass"].get<bool>();
  return json{{"suite", std::string(suite)},
              {"trials", options.trials},
              {"seed", options.seed},
              {"checks", *std::move(checks)},
              {"pass", pass}};
}

}  // namespace dphist
