#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kgs {

/// Exit statuses of a command run.
enum ExitCode : int { exit_ok = 0, exit_not_converged = 1, exit_invalid_config = 2 };

struct CommandRequest {
  std::string command;
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// solve, sweep-g, sweep-uv, ir-check, perturb2, fock-check, probe-ineq, diagnose.
const std::vector<std::string>& command_names();

/// Name of the environment variable that overrides the configured thread count.
inline constexpr const char* kThreadsEnv = "KGS_THREADS";

/// --threads, else KGS_THREADS, else the configured value.
int resolve_threads(std::optional<int> cli, int configured);

/// Runs one command. Results go under the output directory; a manifest is
/// written even when a stage fails to converge. Returns an ExitCode.
int run_command(const CommandRequest& request, std::ostream& out, std::ostream& err);

}  // namespace kgs
