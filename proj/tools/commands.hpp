#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "scenario.hpp"

namespace rampart::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

struct CommandOptions {
  std::string out_dir;  // empty: scenario output.dir
  std::string format;   // empty: scenario output.format
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;  // simulate only
};

/// Each command writes its files under the output directory, prints a short
/// summary to `out` and returns the process exit code.
int cmd_verify_remap(Scenario sc, const CommandOptions& opt, std::ostream& out);
int cmd_analyze(Scenario sc, const CommandOptions& opt, std::ostream& out);
int cmd_simulate(Scenario sc, const CommandOptions& opt, std::ostream& out);
int cmd_bandwidth(Scenario sc, const CommandOptions& opt, std::ostream& out);

/// Parse arguments, run one subcommand and map errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rampart::cli
