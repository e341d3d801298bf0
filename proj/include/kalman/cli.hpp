#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "kalman/error.hpp"
#include "kalman/sim.hpp"

namespace kalman::cli {

enum class Command { simulate, bench, paper_repro, help };

/// Bad command line. The message names the offending token.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct CliConfig {
  Command command = Command::simulate;
  ScenarioOptions scenario;
  std::optional<std::filesystem::path> trace_path;
  std::optional<std::filesystem::path> plot_path;
  std::optional<std::filesystem::path> report_path;
  std::size_t n_runs = 0;
  /// Filled when command == help.
  std::string help_text;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Parses arguments without the program name, e.g. {"simulate", "--dt",
/// "0.2"}. `--help` yields Command::help with the usage text. Throws
/// UsageError for unknown flags, malformed values and values the scenario
/// rules reject.
CliConfig parse_args(std::span<const std::string> args);

/// Parses "x,y;x,y;..." into anchors named a0, a1, ...
std::vector<Anchor> parse_anchors(const std::string& text);

/// Executes a parsed configuration, writing the summary to `out`. Returns
/// the process exit code.
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with the exit-code convention: 0 success, 2 usage
/// error, 1 runtime or numerical error.
int main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace kalman::cli
