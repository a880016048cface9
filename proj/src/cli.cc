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

#include "dphist/cli.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "dphist/accountant.h"
#include "dphist/continual_counter.h"
#include "dphist/gumbel_topk.h"
#include "dphist/internal/status_macros.h"
#include "dphist/io.h"
#include "dphist/random_source.h"
#include "dphist/release_report.h"
#include "dphist/topk_release.h"
#include "dphist/types.h"
#include "dphist/unknown_domain_release.h"
#include "dphist/validation_suites.h"
#include "json.hpp"

namespace dphist {
namespace {

using nlohmann::json;

struct Display {
  std::optional<int> round;
  std::string sort = "label";

  void Register(CLI::App* app) {
    app->add_option("--round", round, "Decimal places kept in noisy counts")
        ->check(CLI::Range(0, 17));
    app->add_option("--sort", sort, "Item order in the output")
        ->check(CLI::IsMember({"label", "count"}));
  }
  DisplayOptions ToOptions() const {
    DisplayOptions options;
    options.round_digits = round;
    options.order = sort == "count" ? ItemOrder::kCount : ItemOrder::kLabel;
    return options;
  }
};

struct ReleaseArgs {
  std::string noise;
  double epsilon = 0.0;
  double delta = 0.0;
  int64_t l0 = 0;
  double linf = 0.0;
  std::string in;
  std::string out;
  uint64_t seed = 0;
  int64_t min_count = 1;
  Display display;
};

struct TopKArgs {
  int64_t kbar = 0;
  std::optional<int64_t> k;
  double epsilon = 0.0;
  double delta = 0.0;
  int64_t l0 = 0;
  double linf = 0.0;
  std::string in;
  std::string out;
  uint64_t seed = 0;
  Display display;
};

struct GumbelArgs {
  int64_t k = 0;
  int64_t kbar = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  int64_t l0 = 1;
  std::string in;
  std::string out;
  uint64_t seed = 0;
};

struct StreamArgs {
  int64_t horizon = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  int64_t l0 = 0;
  uint64_t seed = 0;
  std::string in = "-";
  std::string out;
  std::string dump_state;
  std::string summary;
  Display display;
};

struct AccountArgs {
  double l1 = 0.0;
  double l2 = 0.0;
  double scale = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double delta_prime = 0.0;
  double total_delta = 0.0;
  std::vector<std::string> budgets;
  std::vector<std::string> reports;
};

struct ValidateArgs {
  std::string suite;
  int64_t trials = 100000;
  uint64_t seed = 0;
  int threads = 1;
  std::string report;
};

absl::Status Emit(const std::string& path, const std::string& content,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    out.flush();
    return out ? absl::OkStatus()
               : absl::UnavailableError("Cannot write to standard output.");
  }
  return WriteFile(path, content);
}

std::string Document(const json& value) { return CanonicalJson(value) + "\n"; }

absl::Status RunRelease(const ReleaseArgs& args, std::ostream& out) {
  DPHIST_ASSIGN_OR_RETURN(const NoiseKind noise, ParseNoiseKind(args.noise));
  if (noise == NoiseKind::kGumbel) {
    return absl::InvalidArgumentError(
        "--noise must be laplace or gaussian for release.");
  }
  DPHIST_ASSIGN_OR_RETURN(const SensitivityBound sens,
                          SensitivityBound::Create(args.l0, args.linf));
  DPHIST_RETURN_IF_ERROR(
      UnknownDomainThreshold(noise, sens, args.epsilon, args.delta).status());
  DPHIST_ASSIGN_OR_RETURN(const Histogram histogram,
                          ReadHistogramCsv(args.in));
  RandomSource rng(args.seed);
  UnknownDomainOptions options;
  options.min_count = args.min_count;
  DPHIST_ASSIGN_OR_RETURN(
      const ReleaseReport report,
      ReleaseUnknownDomain(histogram, sens, noise, args.epsilon, args.delta,
                           rng, options));
  const json params = {{"noise", args.noise},   {"epsilon", args.epsilon},
                       {"delta", args.delta},   {"l0", args.l0},
                       {"linf", args.linf},     {"min_count", args.min_count}};
  return Emit(args.out,
              Document(ReportToJson(report, params, args.display.ToOptions())),
              out);
}

absl::Status RunTopKCommand(const TopKArgs& args, std::ostream& out) {
  if (args.k.has_value()) {
    if (*args.k < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("k must be at least 1, got ", *args.k, "."));
    }
    if (*args.k > args.kbar) {
      return absl::InvalidArgumentError("k must not exceed kbar.");
    }
  }
  DPHIST_ASSIGN_OR_RETURN(const SensitivityBound sens,
                          SensitivityBound::Create(args.l0, args.linf));
  DPHIST_RETURN_IF_ERROR(
      TopKThreshold(sens, args.epsilon, args.delta).status());
  DPHIST_ASSIGN_OR_RETURN(const Histogram histogram,
                          ReadHistogramCsv(args.in));
  RandomSource rng(args.seed);
  DPHIST_ASSIGN_OR_RETURN(ReleaseReport report,
                          ReleaseTopK(histogram, args.kbar, sens, args.epsilon,
                                      args.delta, rng));
  json params = {{"kbar", args.kbar},   {"epsilon", args.epsilon},
                 {"delta", args.delta}, {"l0", args.l0},
                 {"linf", args.linf}};
  if (args.k.has_value()) {
    // Post-processing: keep the k largest released noisy counts.
    params["k"] = *args.k;
    std::vector<NoisyCount> items = report.items;
    std::stable_sort(items.begin(), items.end(),
                     [](const NoisyCount& a, const NoisyCount& b) {
                       return a.noisy_count > b.noisy_count;
                     });
    if (items.size() > static_cast<size_t>(*args.k)) {
      items.erase(items.begin() + *args.k, items.end());
    }
    std::sort(items.begin(), items.end(),
              [](const NoisyCount& a, const NoisyCount& b) {
                return a.label < b.label;
              });
    report.items = std::move(items);
  }
  return Emit(args.out,
              Document(ReportToJson(report, params, args.display.ToOptions())),
              out);
}

absl::Status RunGumbel(const GumbelArgs& args, std::ostream& out) {
  if (args.k > args.kbar) {
    return absl::InvalidArgumentError("k must not exceed kbar.");
  }
  DPHIST_RETURN_IF_ERROR(
      GumbelThreshold(args.l0, args.epsilon, args.delta).status());
  DPHIST_ASSIGN_OR_RETURN(const Histogram histogram,
                          ReadHistogramCsv(args.in));
  RandomSource rng(args.seed);
  DPHIST_ASSIGN_OR_RETURN(
      const GumbelTopKResult result,
      ReleaseGumbelTopK(histogram, args.k, args.kbar, args.l0, args.epsilon,
                        args.delta, rng));
  const json params = {{"k", args.k},
                       {"kbar", args.kbar},
                       {"epsilon", args.epsilon},
                       {"delta", args.delta},
                       {"l0", args.l0}};
  return Emit(args.out, Document(GumbelReportToJson(result, params)), out);
}

absl::Status RunStream(const StreamArgs& args, std::istream& in,
                       std::ostream& out) {
  DPHIST_ASSIGN_OR_RETURN(
      const CounterConfig config,
      CounterConfig::Create(args.horizon, args.l0, args.epsilon, args.delta,
                            args.seed));
  DPHIST_ASSIGN_OR_RETURN(ContinualCounter counter,
                          ContinualCounter::Create(config));
  std::ifstream file;
  std::istream* source = &in;
  if (args.in != "-") {
    file.open(args.in, std::ios::binary);
    if (!file) {
      return absl::UnavailableError(
          absl::StrCat("Cannot open '", args.in, "' for reading."));
    }
    source = &file;
  }
  const DisplayOptions display = args.display.ToOptions();
  std::string output;
  std::string line;
  int64_t line_number = 0;
  while (std::getline(*source, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    DPHIST_ASSIGN_OR_RETURN(const StreamEvent event,
                            ParseStreamEvent(line, line_number));
    absl::StatusOr<Snapshot> snapshot = counter.Observe(event);
    if (!snapshot.ok()) {
      return absl::Status(snapshot.status().code(),
                          absl::StrCat("Line ", line_number, ": ",
                                       snapshot.status().message()));
    }
    absl::StrAppend(&output, CanonicalJson(SnapshotToJson(*snapshot, display),
                                           /*indent=*/-1),
                    "\n");
  }
  if (source->bad()) {
    return absl::UnavailableError(
        absl::StrCat("Cannot read stream input '", args.in, "'."));
  }
  DPHIST_RETURN_IF_ERROR(Emit(args.out, output, out));
  if (!args.dump_state.empty()) {
    DPHIST_RETURN_IF_ERROR(
        WriteFile(args.dump_state, Document(counter.DumpState())));
  }
  if (!args.summary.empty()) {
    const json summary = {
        {"mechanism", kMechanismContinualCounter},
        {"params",
         {{"horizon", args.horizon},
          {"epsilon", args.epsilon},
          {"delta", args.delta},
          {"l0", args.l0}}},
        {"seed", args.seed},
        {"threshold_public", config.threshold},
        {"budget", ToJson(counter.budget())},
        {"rounds", counter.round()}};
    DPHIST_RETURN_IF_ERROR(WriteFile(args.summary, Document(summary)));
  }
  return absl::OkStatus();
}

absl::StatusOr<CdpBudget> ParseBudgetArg(const std::string& text) {
  const std::vector<std::string> parts = absl::StrSplit(text, ':');
  double rho = 0.0;
  double delta = 0.0;
  if (parts.size() != 2 || !absl::SimpleAtod(parts[0], &rho) ||
      !absl::SimpleAtod(parts[1], &delta)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "--budget expects RHO:DELTA, got '", text, "'."));
  }
  return CdpBudget::Create(delta, rho);
}

absl::StatusOr<CdpBudget> BudgetFromReport(const std::string& path) {
  DPHIST_ASSIGN_OR_RETURN(const std::string content, ReadFile(path));
  const json parsed = json::parse(content, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() ||
      !parsed.contains("budget")) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", path, "' is not a report with a budget."));
  }
  return CdpBudgetFromJson(parsed["budget"]);
}

absl::Status RunCompose(const AccountArgs& args, std::ostream& out) {
  std::vector<CdpBudget> budgets;
  for (const std::string& text : args.budgets) {
    DPHIST_ASSIGN_OR_RETURN(const CdpBudget budget, ParseBudgetArg(text));
    budgets.push_back(budget);
  }
  for (const std::string& path : args.reports) {
    DPHIST_ASSIGN_OR_RETURN(const CdpBudget budget, BudgetFromReport(path));
    budgets.push_back(budget);
  }
  DPHIST_ASSIGN_OR_RETURN(const CdpBudget total, Compose(budgets));
  out << Document(ToJson(total));
  return absl::OkStatus();
}

absl::Status RunValidate(const ValidateArgs& args, std::ostream& out,
                         bool& passed) {
  SuiteOptions options;
  options.trials = args.trials;
  options.seed = args.seed;
  options.threads = args.threads;
  DPHIST_ASSIGN_OR_RETURN(const json report,
                          RunValidationSuite(args.suite, options));
  passed = report["pass"].get<bool>();
  return Emit(args.report, Document(report), out);
}

void AddIo(CLI::App* cmd, std::string& in, std::string& out, uint64_t& seed) {
  cmd->add_option("--in", in, "Input histogram CSV (label,count)")
      ->required();
  cmd->add_option("--out", out, "Output report path (default: stdout)");
  cmd->add_option("--seed", seed, "Random seed");
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kUnimplemented:
      return kExitUsage;
    default:
      return kExitIo;
  }
}

int RunCli(int argc, const char* const* argv, std::istream& in,
           std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentially private histogram release over unknown "
               "domains.",
               "dphist"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ReleaseArgs release;
  CLI::App* release_cmd =
      app.add_subcommand("release", "Threshold noisy counts (Laplace or "
                                    "Gaussian) over an unknown domain");
  release_cmd->add_option("--noise", release.noise, "Noise distribution")
      ->required()
      ->check(CLI::IsMember({"laplace", "gaussian"}));
  release_cmd->add_option("--epsilon", release.epsilon)->required();
  release_cmd->add_option("--delta", release.delta)->required();
  release_cmd->add_option("--l0", release.l0, "Labels a user may touch")
      ->required();
  release_cmd->add_option("--linf", release.linf, "Per-label contribution cap")
      ->required();
  release_cmd->add_option("--min-count", release.min_count,
                          "Smallest admissible input count");
  AddIo(release_cmd, release.in, release.out, release.seed);
  release.display.Register(release_cmd);

  TopKArgs topk;
  CLI::App* topk_cmd = app.add_subcommand(
      "topk", "Gaussian top-k release with a data-dependent threshold");
  topk_cmd->add_option("--kbar", topk.kbar, "Entries kept before noise")
      ->required();
  topk_cmd->add_option("--k", topk.k,
                       "Keep at most k of the released counts (k <= kbar)");
  topk_cmd->add_option("--epsilon", topk.epsilon)->required();
  topk_cmd->add_option("--delta", topk.delta)->required();
  topk_cmd->add_option("--l0", topk.l0)->required();
  topk_cmd->add_option("--linf", topk.linf)->required();
  AddIo(topk_cmd, topk.in, topk.out, topk.seed);
  topk.display.Register(topk_cmd);

  GumbelArgs gumbel;
  CLI::App* gumbel_cmd = app.add_subcommand(
      "gumbel-topk", "One-shot Gumbel top-k ranked list without counts");
  gumbel_cmd->add_option("--k", gumbel.k)->required();
  gumbel_cmd->add_option("--kbar", gumbel.kbar)->required();
  gumbel_cmd->add_option("--epsilon", gumbel.epsilon)->required();
  gumbel_cmd->add_option("--delta", gumbel.delta)->required();
  gumbel_cmd->add_option("--l0", gumbel.l0,
                         "Labels a user may touch, used by the threshold");
  AddIo(gumbel_cmd, gumbel.in, gumbel.out, gumbel.seed);

  StreamArgs stream;
  CLI::App* stream_cmd = app.add_subcommand(
      "stream", "Continual release of per-label counts over a stream");
  stream_cmd->add_option("--horizon", stream.horizon)->required();
  stream_cmd->add_option("--epsilon", stream.epsilon)->required();
  stream_cmd->add_option("--delta", stream.delta)->required();
  stream_cmd->add_option("--l0", stream.l0, "Items per event")->required();
  stream_cmd->add_option("--seed", stream.seed);
  stream_cmd->add_option("--in", stream.in,
                         "JSON-lines events, '-' for stdin");
  stream_cmd->add_option("--out", stream.out,
                         "JSON-lines snapshots (default: stdout)");
  stream_cmd->add_option("--dump-state", stream.dump_state,
                         "Write the final counter state here");
  stream_cmd->add_option("--summary", stream.summary,
                         "Write the budget summary here");
  stream.display.Register(stream_cmd);

  AccountArgs account;
  CLI::App* account_cmd =
      app.add_subcommand("account", "Privacy budget arithmetic");
  account_cmd->require_subcommand(1);
  CLI::App* laplace_cmd = account_cmd->add_subcommand(
      "laplace-dp", "Pure DP of the Laplace mechanism");
  laplace_cmd->add_option("--l1", account.l1)->required();
  laplace_cmd->add_option("--scale", account.scale)->required();
  CLI::App* gaussian_cmd = account_cmd->add_subcommand(
      "gaussian-cdp", "zCDP of the Gaussian mechanism");
  gaussian_cmd->add_option("--l2", account.l2)->required();
  gaussian_cmd->add_option("--sigma", account.sigma)->required();
  CLI::App* expmech_cmd = account_cmd->add_subcommand(
      "expmech-cdp", "zCDP of the exponential mechanism");
  expmech_cmd->add_option("--epsilon", account.epsilon)->required();
  CLI::App* dp_to_cdp_cmd = account_cmd->add_subcommand(
      "dp-to-cdp", "Convert (epsilon, delta)-DP to approximate zCDP");
  dp_to_cdp_cmd->add_option("--epsilon", account.epsilon)->required();
  dp_to_cdp_cmd->add_option("--delta", account.delta);
  CLI::App* cdp_to_dp_cmd = account_cmd->add_subcommand(
      "cdp-to-dp", "Convert approximate zCDP to (epsilon, delta)-DP");
  cdp_to_dp_cmd->add_option("--rho", account.rho)->required();
  cdp_to_dp_cmd->add_option("--delta", account.delta);
  cdp_to_dp_cmd->add_option("--delta-prime", account.delta_prime)
      ->required();
  CLI::App* optimize_cmd = account_cmd->add_subcommand(
      "cdp-to-dp-optimize", "Best conversion under a total delta");
  optimize_cmd->add_option("--rho", account.rho)->required();
  optimize_cmd->add_option("--delta", account.delta);
  optimize_cmd->add_option("--total-delta", account.total_delta)->required();
  CLI::App* compose_cmd = account_cmd->add_subcommand(
      "compose", "Compose budgets given inline or read from reports");
  compose_cmd->add_option("--budget", account.budgets,
                          "RHO:DELTA, repeatable");
  compose_cmd->add_option("--report", account.reports,
                          "Report JSON with a budget, repeatable");

  ValidateArgs validate;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "Statistical privacy checks on worst-case inputs");
  validate_cmd->add_option("--suite", validate.suite)
      ->required()
      ->check(CLI::IsMember({"alg1", "topk", "gumbel", "stream", "renyi"}));
  validate_cmd->add_option("--trials", validate.trials,
                           "Trials per event check");
  validate_cmd->add_option("--seed", validate.seed);
  validate_cmd->add_option("--threads", validate.threads)
      ->check(CLI::Range(1, 256));
  validate_cmd->add_option("--report", validate.report,
                           "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  absl::Status status;
  bool passed = true;
  if (release_cmd->parsed()) {
    status = RunRelease(release, out);
  } else if (topk_cmd->parsed()) {
    status = RunTopKCommand(topk, out);
  } else if (gumbel_cmd->parsed()) {
    status = RunGumbel(gumbel, out);
  } else if (stream_cmd->parsed()) {
    status = RunStream(stream, in, out);
  } else if (laplace_cmd->parsed()) {
    absl::StatusOr<DpBudget> b = LaplacePureDp(account.l1, account.scale);
    status = b.status();
    if (b.ok()) out << Document(ToJson(*b));
  } else if (gaussian_cmd->parsed()) {
    absl::StatusOr<CdpBudget> b = GaussianCdp(account.l2, account.sigma);
    status = b.status();
    if (b.ok()) out << Document(ToJson(*b));
  } else if (expmech_cmd->parsed()) {
    absl::StatusOr<CdpBudget> b = ExpMechCdp(account.epsilon);
    status = b.status();
    if (b.ok()) out << Document(ToJson(*b));
  } else if (dp_to_cdp_cmd->parsed()) {
    absl::StatusOr<DpBudget> dp =
        DpBudget::Create(account.epsilon, account.delta);
    status = dp.status();
    if (dp.ok()) out << Document(ToJson(DpToCdp(*dp)));
  } else if (cdp_to_dp_cmd->parsed() || optimize_cmd->parsed()) {
    absl::StatusOr<CdpBudget> cdp =
        CdpBudget::Create(account.delta, account.rho);
    status = cdp.status();
    if (cdp.ok()) {
      absl::StatusOr<DpBudget> dp =
          cdp_to_dp_cmd->parsed()
              ? CdpToDp(*cdp, account.delta_prime)
              : CdpToDpOptimize(*cdp, account.total_delta);
      status = dp.status();
      if (dp.ok()) out << Document(ToJson(*dp));
    }
  } else if (compose_cmd->parsed()) {
    status = RunCompose(account, out);
  } else if (validate_cmd->parsed()) {
    status = RunValidate(validate, out, passed);
  }

  if (!status.ok()) {
    err << "dphist: " << status.message() << "\n";
    return ExitCodeFor(status);
  }
  return passed ? kExitOk : kExitCheckFailed;
}

}  // namespace dphist
