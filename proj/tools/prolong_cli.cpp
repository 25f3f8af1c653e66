#include "prolong/io.hpp"
#include "prolong/property_suite.hpp"
#include "prolong/scenario.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Equivariant extension of algebra and frame bundles from a closed subset"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  bool strict = false;
  bool lenient = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write its reports");
  run->add_option("config", config_path, "Scenario configuration (JSON)")->required();
  run->add_option("--out-dir", out_dir, "Directory for relative report paths");
  auto* strict_flag = run->add_flag("--strict", strict, "Exit with code 3 when W = Z");
  run->add_flag("--no-strict", lenient, "Treat W = Z as an ordinary invariant failure")->excludes(strict_flag);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario configuration without running it");
  validate->add_option("config", validate_path, "Scenario configuration (JSON)")->required();

  std::uint64_t seed = 0;
  int trials = 100;
  std::string report_path;
  auto* suite = app.add_subcommand("suite", "Run the randomized property suite");
  suite->add_option("--seed", seed, "Pseudo-random seed");
  suite->add_option("--trials", trials, "Trials per randomized property")->check(CLI::PositiveNumber);
  suite->add_option("--out", report_path, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : prolong::kExitConfigError;
  }

  if (*run) {
    try {
      auto config = prolong::load_scenario_config(config_path);
      if (strict) config.strict = true;
      if (lenient) config.strict = false;
      const auto outcome = prolong::run_scenario(config);
      if (outcome.exit_code == prolong::kExitConfigError) {
        std::cerr << "config error: " << outcome.message << '\n';
        return outcome.exit_code;
      }
      prolong::write_scenario_outputs(config, outcome, out_dir);
      std::cout << config.name << ": " << outcome.message << " (|W| = " << outcome.w_size
                << ", radius = " << prolong::format_real(outcome.radius) << ")\n";
      return outcome.exit_code;
    } catch (const prolong::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return prolong::kExitConfigError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return prolong::kExitInvariantFailure;
    }
  }

  if (*validate) {
    try {
      prolong::validate_scenario(prolong::load_scenario_config(validate_path));
      std::cout << "valid\n";
      return prolong::kExitSuccess;
    } catch (const prolong::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return prolong::kExitConfigError;
    }
  }

  const auto report = prolong::run_property_suite(seed, trials);
  const std::string text = report.to_json();
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << report_path << "'\n";
      return prolong::kExitConfigError;
    }
    out << text;
  }
  return report.passed() ? prolong::kExitSuccess : prolong::kExitInvariantFailure;
}
