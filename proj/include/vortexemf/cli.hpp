#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vortexemf/config.hpp"
#include "vortexemf/emf.hpp"
#include "vortexemf/nernst.hpp"
#include "vortexemf/units.hpp"

namespace vemf::cli {

/// Bumped whenever a summary field changes meaning or disappears.
inline constexpr int kSchemaVersion = 1;

inline constexpr std::string_view kCommands[] = {"winding", "quantize", "manybody-check",
                                                 "faraday", "berry-emf", "nernst"};

enum ExitCode : int { kOk = 0, kParseError = 2, kValidationError = 3, kComputationError = 4 };

/// ParseError -> 2, ValidationError -> 3, everything else -> 4.
int exit_code_for(const std::exception& e) noexcept;

/// Command-line values; each one wins over the matching global config key.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<UnitMode> units;
};

struct RunOutcome {
  std::string command;
  nlohmann::ordered_json summary;
  std::string summary_line;
  std::vector<std::filesystem::path> artifacts;
};

/// Validates the whole scenario, then runs it and writes the artifacts under
/// the output directory. An empty `command` takes the global "command" key.
RunOutcome run_scenario(const ConfigFile& config, std::string_view command, const Overrides& overrides);

/// Whitespace-separated columns under a "# name name ..." header, %.17g.
/// Unwritable paths throw IoError.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

/// EMF trace of the first realization: t, emf. Header only when empty.
void emit_plot_data(const NernstResult& result, const std::filesystem::path& path);

struct SweepPoint {
  double delta_n = 0.0;  // n_a - n_m
  double e_y_mean = 0.0;
  double e_y_stderr = 0.0;
  double e_y_predicted = 0.0;
};
/// delta_n, e_y_mean, e_y_stderr, e_y_predicted per row.
void emit_plot_data(const std::vector<SweepPoint>& sweep, const std::filesystem::path& path);

/// induction, lorentz per time sample.
void emit_plot_data(const std::vector<FaradayTerms>& samples, const std::filesystem::path& path);

/// Whole command line: subcommands, flags, exit codes.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace vemf::cli
