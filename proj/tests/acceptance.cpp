// Acceptance checks: one PASS/FAIL line per criterion.
#include "prolong/io.hpp"
#include "prolong/property_suite.hpp"
#include "prolong/scenario.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

using namespace prolong;
using nlohmann::json;

namespace {

const std::filesystem::path kScenarios = PROLONG_SCENARIO_DIR;
constexpr std::uint64_t kSeed = 20240601;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string suite_detail(const SuiteResult& s) {
  std::string out = std::to_string(s.cases - s.failures) + "/" + std::to_string(s.cases) + " cases";
  for (const auto& [k, v] : s.metrics) out += ", " + k + "=" + fmt(v);
  for (const auto& [k, ok] : s.checks)
    if (!ok) out += ", failed check " + k;
  return out;
}

Verdict from_suite(const SuiteResult& s) { return {s.passed(), suite_detail(s)}; }

ScenarioOutcome run_shipped(const std::string& name, double* seconds = nullptr) {
  const auto config = load_scenario_config(kScenarios / (name + ".json"));
  const auto start = std::chrono::steady_clock::now();
  auto outcome = run_scenario(config);
  if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

Verdict criterion_circle() {
  double seconds = 0;
  const auto out = run_shipped("circle-c2-in-m4-z4", &seconds);
  if (out.exit_code != kExitSuccess) return {false, "exit code " + std::to_string(out.exit_code) + ": " + out.message};
  const auto s = json::parse(out.summary_json);
  const double step = 0.1;
  const double radius = s["radius"].get<double>();
  const double restriction = s["restriction_defect"].get<double>();
  const double mult = s["max_defect"].get<double>();
  const bool bounds = s["K2"].is_number() && s["K0"].is_number();
  const bool pass = radius >= step * (1 - 1e-9) && restriction <= 1e-14 && mult <= 1e-10 && bounds && seconds < 10;
  return {pass, "radius=" + fmt(radius) + ", restriction=" + fmt(restriction) + ", multiplicativity=" + fmt(mult) +
                    (bounds ? ", K2=" + fmt(s["K2"].get<double>()) + ", K0=" + fmt(s["K0"].get<double>()) : ", bounds missing") +
                    ", runtime=" + fmt(seconds) + "s"};
}

Verdict criterion_tangent() {
  const auto out = run_shipped("tangent-circle-hilbert");
  if (out.exit_code != kExitSuccess) return {false, "exit code " + std::to_string(out.exit_code) + ": " + out.message};
  const auto s = json::parse(out.summary_json);
  const double radius = s["radius"].get<double>();
  const double iso = s["max_defect"].get<double>();
  const double equi = s["max_equivariance_defect"].get<double>();
  const double restriction = s["restriction_defect"].get<double>();
  const bool pass = radius > 0 && iso <= 1e-12 && equi <= 1e-10 && restriction == 0.0;
  return {pass, "radius=" + fmt(radius) + ", isometry=" + fmt(iso) + ", equivariance=" + fmt(equi) +
                    ", restriction=" + fmt(restriction)};
}

Verdict criterion_degenerate() {
  const auto config = load_scenario_config(kScenarios / "degenerate-split.json");
  const auto out = run_scenario(config);
  if (out.summary_json.empty()) return {false, "no report: " + out.message};
  const auto s = json::parse(out.summary_json);
  const bool w_is_z = s["w_size"].get<std::size_t>() == s["z_size"].get<std::size_t>();
  const double worst = s["max_defect"].get<double>();
  const bool pass = out.exit_code == kExitDegenerate && w_is_z && worst <= config.options.rectify_tol;
  return {pass, "exit=" + std::to_string(out.exit_code) + ", |W|=" + std::to_string(s["w_size"].get<int>()) +
                    ", |Z|=" + std::to_string(s["z_size"].get<int>()) + ", max defect in W=" + fmt(worst)};
}

Verdict criterion_determinism() {
  bool same = true;
  for (const char* name : {"circle-c2-in-m4-z4", "tangent-circle-hilbert", "degenerate-split"}) {
    const auto a = run_shipped(name);
    const auto b = run_shipped(name);
    same = same && a.summary_json == b.summary_json && a.diagnostics_csv == b.diagnostics_csv;
  }
  const bool suite_same = run_property_suite(kSeed, 2).to_json() == run_property_suite(kSeed, 2).to_json();
  return {same && suite_same, std::string("scenario reports ") + (same ? "identical" : "differ") + ", suite reports " +
                                  (suite_same ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"separability idempotents of all products up to dimension 32", [] { return from_suite(separability_suite(32)); }},
      {"invariance under 100 random inner automorphisms of M4", [] { return from_suite(automorphism_suite(kSeed, 100)); }},
      {"star symmetrization on shipped *-algebras", [] { return from_suite(star_suite()); }},
      {"quadratic rectifier contraction into M6", [] { return from_suite(contraction_suite(kSeed, 200)); }},
      {"homomorphisms are fixed points", [] { return from_suite(fixed_point_suite(kSeed, 25)); }},
      {"averaging and rectification preserve equivariance", [] { return from_suite(equivariance_suite(kSeed, 25)); }},
      {"circle-c2-in-m4-z4 end to end", criterion_circle},
      {"tangent-circle-hilbert end to end", criterion_tangent},
      {"degenerate germ yields W = Z and exit 3", criterion_degenerate},
      {"byte-identical reports on repeated runs", criterion_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %2zu %s (%s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu acceptance criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
