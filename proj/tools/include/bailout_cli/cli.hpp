#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace bailout::cli {

enum class Command {
  Scale,
  Barrier,
  Thresholds,
  Constrained,
  Simulate,
  Figure1,
  Figure2,
  Figure3,
  Figure4,
};

enum class Format { Csv, Json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunSpec {
  Command command = Command::Scale;
  std::filesystem::path model_path;
  std::optional<double> q;
  std::optional<double> delta;
  std::optional<double> x;
  std::optional<double> K;
  std::optional<double> lambda;
  std::optional<double> a;
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<std::string> lambda_grid;
  std::optional<std::string> x_grid;
  std::optional<std::string> K_grid;
  /// simulate: optimal | barrier | pair | none
  std::string policy = "optimal";
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<double> kill_after;
  std::uint64_t seed = 1;
  std::size_t paths = 100000;
  unsigned threads = 0;
  /// Empty writes to the `out` stream passed to run().
  std::filesystem::path output_path;
  Format format = Format::Csv;
};

std::string to_string(Command c);

/// Parsed command line, or the exit code to return when parsing ends the
/// program (help, usage errors).
struct ParseOutcome {
  std::optional<RunSpec> spec;
  int exit_code = kExitOk;
};

ParseOutcome parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                std::ostream& err);

/// Runs one command. Errors are reported as a JSON object on `err`; the
/// return value is the process exit status.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace bailout::cli
