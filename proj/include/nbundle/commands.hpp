#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "nbundle/config.hpp"

namespace nbundle {

struct GlobalOptions {
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

/// Exit codes shared by all subcommands.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3 };

// Each command validates its config sections, runs, writes its files under
// out_dir and echoes its main result to `out`. Errors propagate as exceptions;
// `run_command` maps them to exit codes.
void cmd_steady(const RunConfig& config, const GlobalOptions& options, std::ostream& out);
void cmd_sweep(const RunConfig& config, const GlobalOptions& options, std::ostream& out);
void cmd_traj(const RunConfig& config, const GlobalOptions& options, std::ostream& out);
void cmd_calibrate(const RunConfig& config, const GlobalOptions& options, std::ostream& out);
void cmd_theory(const RunConfig& config, const GlobalOptions& options, std::ostream& out);

/// Dispatches by name; returns the exit code and prints diagnostics to `err`.
int run_command(const std::string& name, const RunConfig& config, const GlobalOptions& options, std::ostream& out,
                std::ostream& err);

/// '#'-prefixed reproducibility header (version, command, resolved parameters).
std::string csv_header(const std::string& command, const SystemParams& params);

}  // namespace nbundle
