#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noma_lab/config.hpp"

namespace noma {

/// Bad command line; maps to exit status 1.
struct UsageError : Error {
  using Error::Error;
};

/// `--help` was given; what() holds the help text (exit status 0).
struct HelpRequested : Error {
  using Error::Error;
};

enum class Verb { run, validate, oracle, list_scenarios };

struct Command {
  Verb verb = Verb::list_scenarios;
  std::string target; ///< scenario name/path or config path
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string out;            ///< result CSV
  std::string solver_out;     ///< per-trial solver CSV
  std::string trajectory_out; ///< EE trajectories CSV
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<unsigned> threads;
  int verbosity = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitInfeasible = 2;

/// argv without the program name. Throws UsageError.
Command parse_args(const std::vector<std::string>& args);

/// Executes a parsed command; returns the exit status.
int run_command(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse_args + run_command with errors mapped to exit statuses.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace noma
