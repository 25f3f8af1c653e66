#include "doctest.h"

#include "prolong/property_suite.hpp"
#include "prolong/scenario.hpp"

#include "json.hpp"

#include <filesystem>

using namespace prolong;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = PROLONG_SCENARIO_DIR;

std::string minimal_config(const std::string& z = R"({"type": "annulus", "radius": 0.6, "width": 0.05})") {
  return R"({"name": "t", "mode": "hilbert", "ground_field": "real",
            "base": {"nx": 9, "ny": 9, "box": [-1, 1, -1, 1], "z": )" + z + R"(},
            "hilbert": {"rank": 1, "ambient_dim": 2},
            "germ": {"family": "tangent-line"},
            "action": {"type": "grid-rotation", "target": "rotation"}})";
}

std::string error_location(const std::string& text) {
  try {
    parse_scenario_config(text);
  } catch (const ConfigError& e) {
    return e.location();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("configuration errors carry their location") {
  CHECK_NOTHROW(parse_scenario_config(minimal_config()));
  CHECK(error_location(R"({"name": "x", "base": {"nx": "nine", "z": {"type": "all"}}, "germ": {"family": "constant"}, "model": {"blocks": [1]}, "ambient": {"blocks": [1]}})") ==
        "/base/nx");
  CHECK(error_location(R"({"name": "x", "colour": 1})") == "/");
  CHECK(error_location(minimal_config(R"({"type": "disk"})")) == "/base/z/type");
  CHECK(error_location("{ nope") != "<none>");
  std::string negative_tol = minimal_config();
  negative_tol.insert(negative_tol.rfind('}'), R"(, "tolerances": {"rectify": -1})");
  CHECK(error_location(negative_tol) == "/tolerances/rectify");
}

TEST_CASE("an empty Z is a validation error and writes nothing") {
  const auto config = parse_scenario_config(minimal_config(R"({"type": "annulus", "center": [5, 5], "radius": 0.1})"));
  CHECK_THROWS_AS(validate_scenario(config), ConfigError);
  const auto outcome = run_scenario(config);
  CHECK(outcome.exit_code == kExitConfigError);
  const fs::path dir = fs::temp_directory_path() / "prolong_empty_z";
  fs::remove_all(dir);
  write_scenario_outputs(config, outcome, dir);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("a non-equivariant germ is rejected") {
  std::string text = minimal_config();
  text.replace(text.find("tangent-line"), std::string("tangent-line").size(), "constant");
  CHECK_THROWS_AS(validate_scenario(parse_scenario_config(text)), ConfigError);
}

TEST_CASE("shipped circle scenario") {
  const auto config = load_scenario_config(kScenarios / "circle-c2-in-m4-z4.json");
  CHECK_NOTHROW(validate_scenario(config));
  const auto outcome = run_scenario(config);
  CHECK(outcome.exit_code == kExitSuccess);
  CHECK(outcome.radius > 0);
  for (const auto& [name, ok] : outcome.invariants) CHECK_MESSAGE(ok, name);
  const auto summary = nlohmann::json::parse(outcome.summary_json);
  CHECK(summary["radius"].get<double>() > 0);
  CHECK(summary["K2"].is_number());
  CHECK(summary["K0"].is_number());
  CHECK(run_scenario(config).summary_json == outcome.summary_json);
  CHECK(run_scenario(config).diagnostics_csv == outcome.diagnostics_csv);
}

TEST_CASE("shipped tangent scenario") {
  const auto outcome = run_scenario(load_scenario_config(kScenarios / "tangent-circle-hilbert.json"));
  CHECK(outcome.exit_code == kExitSuccess);
  CHECK(outcome.invariants.at("isometric"));
}

TEST_CASE("degenerate scenario exit codes") {
  auto config = load_scenario_config(kScenarios / "degenerate-split.json");
  auto outcome = run_scenario(config);
  CHECK(outcome.exit_code == kExitDegenerate);
  config.strict = false;
  outcome = run_scenario(config);
  CHECK(outcome.exit_code == kExitInvariantFailure);
  CHECK_FALSE(outcome.invariants.at("radius_positive"));
  CHECK(outcome.invariants.at("multiplicative"));
}

TEST_CASE("property suite smoke run is deterministic") {
  const auto a = run_property_suite(5, 1);
  const auto b = run_property_suite(5, 1);
  CHECK(a.passed());
  CHECK(a.to_json() == b.to_json());
  CHECK_THROWS_AS(run_property_suite(5, 0), std::invalid_argument);
}
