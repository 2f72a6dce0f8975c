// sigma_lab: exact verification of the sigma-finite measure attached to a
// class (Sigma) submartingale on a finite tree, plus Monte Carlo probes.
//
//   sigma_lab decompose SPEC [--horizon H] [--max-horizon N] [--csv]
//   sigma_lab qmeasure  SPEC [--horizon H] [--all-checks] [--max-horizon N] [--csv]
//   sigma_lab mc        SPEC [--n N] [--count C] [--seed S] [--scaling-m M] [--t T] [--streams K] [--csv]
//
// The JSON report goes to stdout and a table to stderr. Exit status: 0 all
// checks passed, 1 a check failed, 2 bad spec or flags, 3 horizon over cap.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/spec_io.hpp"
#include "sigmalab/parallel.hpp"

namespace {

using sigmalab::cli::CommandResult;

int emit(CommandResult result, bool timing, std::chrono::steady_clock::time_point start) {
  if (timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    result.report["timing_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  std::cout << result.report.dump(2) << '\n';
  std::cerr << result.table;
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sigmalab::cli;

  CLI::App app{"Exact and Monte Carlo verification of the sigma-finite measure Q of a class (Sigma) submartingale"};
  app.require_subcommand(1);
  bool timing = false;
  app.add_flag("--timing", timing, "Add wall-clock timing to the report (makes it non-deterministic)");

  std::string spec_path;
  DecomposeOptions decompose_opts;
  QMeasureOptions qmeasure_opts;
  McCommandOptions mc_opts;
  int threads = 0;

  auto* decompose = app.add_subcommand("decompose", "Doob decomposition and class (Sigma) verdict");
  decompose->add_option("spec", spec_path, "Process spec (JSON)")->required();
  decompose->add_option("--horizon", decompose_opts.horizon, "Override the gallery horizon");
  decompose->add_option("--max-horizon", decompose_opts.max_horizon, "Enumeration cap")->check(CLI::PositiveNumber);
  decompose->add_flag("--csv", decompose_opts.csv, "CSV table on stderr");

  auto* qmeasure = app.add_subcommand("qmeasure", "Construct Q^(n) and verify the identity and its proof chain");
  qmeasure->add_option("spec", spec_path, "Process spec (JSON)")->required();
  qmeasure->add_option("--horizon", qmeasure_opts.horizon, "Override the gallery horizon");
  qmeasure->add_flag("--all-checks", qmeasure_opts.all_checks,
                     "Add density, restriction, monotonicity and uniqueness checks");
  qmeasure->add_option("--max-horizon", qmeasure_opts.max_horizon, "Enumeration cap")->check(CLI::PositiveNumber);
  qmeasure->add_flag("--csv", qmeasure_opts.csv, "CSV table on stderr: n,E_P[X_n],Q[g=n]");

  auto* mc = app.add_subcommand("mc", "Monte Carlo estimates of Q-functionals and the Brownian scaling probe");
  mc->add_option("spec", spec_path, "Process spec (JSON)")->required();
  mc->add_option("--n", mc_opts.n, "Time index n of Q[1_{g<n}] (default: spec horizon)");
  mc->add_option("--count", mc_opts.count, "Number of sampled paths")->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_opts.seed, "Base seed");
  mc->add_option("--scaling-m", mc_opts.scaling_m, "Steps per unit time for the scaling probe")
      ->check(CLI::PositiveNumber);
  mc->add_option("--t", mc_opts.t, "Target time for the scaling probe")->check(CLI::PositiveNumber);
  mc->add_option("--streams", mc_opts.streams, "Independent RNG streams (fixes the result)")
      ->check(CLI::PositiveNumber);
  mc->add_option("--max-horizon", mc_opts.max_horizon, "Largest n with an exact target")->check(CLI::PositiveNumber);
  mc->add_flag("--csv", mc_opts.csv, "CSV table on stderr");

  for (auto* sub : {decompose, qmeasure, mc}) {
    sub->add_option("--threads", threads, "Worker threads (default: SIGMA_LAB_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSpecError;
  }

  const unsigned worker_cap = sigmalab::worker_count();
  const unsigned workers = threads > 0 ? std::min(static_cast<unsigned>(threads), worker_cap) : worker_cap;
  qmeasure_opts.threads = workers;
  mc_opts.threads = workers;

  const auto start = std::chrono::steady_clock::now();
  const std::string command = app.get_subcommands().front()->get_name();
  sigmalab::ProcessSpec spec;
  try {
    spec = load_spec(spec_path);
  } catch (const SpecError& e) {
    return emit(spec_error_result(command, e), timing, start);
  }

  if (command == "decompose") return emit(cmd_decompose(spec, decompose_opts), timing, start);
  if (command == "qmeasure") return emit(cmd_qmeasure(spec, qmeasure_opts), timing, start);
  return emit(cmd_mc(spec, mc_opts), timing, start);
}
