#ifndef PROLONG_SCENARIO_HPP
#define PROLONG_SCENARIO_HPP

#include "prolong/bundle.hpp"
#include "prolong/germs.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace prolong {

/// Process exit codes of the scenario runner.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitInvariantFailure = 1,
  kExitConfigError = 2,
  kExitDegenerate = 3,
};

/// Configuration problem; `location` is a JSON pointer into the document.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string location, const std::string& message)
      : std::runtime_error(location.empty() ? message : location + ": " + message), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

struct ZPredicateSpec {
  /// "annulus", "all", "columns" or "vertices".
  std::string type = "annulus";
  std::array<double, 2> center{0.0, 0.0};
  double radius = 1.0;
  double width = 0.05;
  /// "columns": vertices with x <= lo or x >= hi.
  double lo = -0.5;
  double hi = 0.5;
  std::vector<int> vertices;
};

struct BaseSpec {
  /// "grid" or "path".
  std::string type = "grid";
  int nx = 21;
  int ny = 21;
  Box box;
  std::vector<double> path_lengths;
  ZPredicateSpec z;
};

struct AlgebraSpec {
  /// Matrix block sizes over the scalar field; empty when `file` is used.
  BlockSizes blocks;
  std::string file;
};

struct GermSpec {
  /// "rotated-projection", "split-rotation", "constant", "perturbed-identity",
  /// "tangent-line" or "table".
  std::string family;
  double frequency = 1.0;
  double amplitude = 0.1;
  double split = 0.0;
  std::uint64_t seed = 0;
  /// "table": vertex -> row-major scalars, complex as [re, im].
  std::map<int, std::vector<std::complex<double>>> table;
};

struct ActionSpec {
  /// "trivial", "grid-rotation" or "grid-reflection".
  std::string type = "trivial";
  /// "identity", "rotation" (2x2 quarter turn), "rotation-conjugation"
  /// (conjugation by the quarter plane rotation of M_N) or "matrix".
  std::string source = "identity";
  std::string target = "identity";
  std::vector<std::complex<double>> source_matrix;
  std::vector<std::complex<double>> target_matrix;
};

struct ScenarioConfig {
  std::string name;
  /// "algebra" or "hilbert".
  std::string mode = "algebra";
  GroundField field = GroundField::Complex;
  BaseSpec base;
  AlgebraSpec model;
  AlgebraSpec ambient;
  Index hilbert_rank = 1;
  Index hilbert_ambient = 2;
  bool star_mode = false;
  GermSpec germ;
  ActionSpec action;
  ExtensionOptions options;
  bool strict = true;
  std::string diagnostics_path;
  std::string summary_path;
  std::filesystem::path config_dir;
};

/// Parses and validates a configuration document. Throws ConfigError.
ScenarioConfig parse_scenario_config(const std::string& text, const std::filesystem::path& config_dir = {});

ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct ScenarioOutcome {
  int exit_code = kExitSuccess;
  std::string message;
  std::string diagnostics_csv;
  std::string summary_json;
  double radius = 0;
  std::size_t w_size = 0;
  std::map<std::string, bool> invariants;
};

/// Builds every object the configuration refers to and runs the input
/// checks of the pipeline without extending anything. Throws ConfigError.
void validate_scenario(const ScenarioConfig& config);

/// Executes the configured pipeline; reports are returned, not written.
/// Validation failures yield exit code 2 and empty reports.
ScenarioOutcome run_scenario(const ScenarioConfig& config);

/// Writes the reports of a finished run. Relative paths resolve against
/// out_dir. Nothing is written for config errors.
void write_scenario_outputs(const ScenarioConfig& config, const ScenarioOutcome& outcome,
                            const std::filesystem::path& out_dir);

}  // namespace prolong

#endif  // PROLONG_SCENARIO_HPP
