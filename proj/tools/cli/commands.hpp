#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "cli/spec_io.hpp"
#include "sigmalab/process_spec.hpp"

namespace sigmalab::cli {

// Process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  // some requested check failed; the report names a witness
  kExitSpecError = 2,    // unreadable or malformed spec, bad flags
  kExitRefused = 3,      // horizon above the enumeration cap
};

inline constexpr int kDefaultMaxHorizon = 16;

// Report (JSON, for stdout) plus a human-readable or CSV table (for stderr).
struct CommandResult {
  nlohmann::json report;
  std::string table;
  int exit_code = kExitOk;
};

struct DecomposeOptions {
  std::optional<int> horizon;
  int max_horizon = kDefaultMaxHorizon;
  bool csv = false;
};

struct QMeasureOptions {
  std::optional<int> horizon;
  bool all_checks = false;
  int max_horizon = kDefaultMaxHorizon;
  bool csv = false;
  unsigned threads = 0;  // 0: worker_count()
};

struct McCommandOptions {
  std::optional<int> n;
  std::uint64_t count = 100000;
  std::uint64_t seed = 0;
  std::optional<int> scaling_m;
  std::optional<double> t;
  std::uint32_t streams = 16;
  unsigned threads = 0;
  int max_horizon = kDefaultMaxHorizon;
  bool csv = false;
};

CommandResult cmd_decompose(const ProcessSpec& spec, const DecomposeOptions& options);
CommandResult cmd_qmeasure(const ProcessSpec& spec, const QMeasureOptions& options);
CommandResult cmd_mc(const ProcessSpec& spec, const McCommandOptions& options);

// Report for a spec that could not be read or parsed.
CommandResult spec_error_result(const std::string& command, const SpecError& error);

}  // namespace sigmalab::cli
