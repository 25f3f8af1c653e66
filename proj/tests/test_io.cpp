#include "doctest.h"

#include "prolong/germs.hpp"
#include "prolong/io.hpp"

#include <sstream>

using namespace prolong;
using C = std::complex<double>;

TEST_CASE("scalars are printed with round-trip precision") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
}

namespace {

template <typename S>
void check_round_trip(const Algebra<S>& a) {
  const std::string text = serialize_algebra(a);
  const auto b = parse_algebra<S>(text);
  CHECK(b.dim() == a.dim());
  CHECK(b.label() == a.label());
  CHECK(b.flat_structure_constants() == a.flat_structure_constants());
  CHECK((b.unit() - a.unit()).norm() == 0.0);
  CHECK(serialize_algebra(b) == text);
}

}  // namespace

TEST_CASE("algebra documents round-trip") {
  check_round_trip(make_matrix_algebra<double>(2, DivisionRing::Quaternion));
  check_round_trip(make_block_algebra<C>({1, 2}));
  check_round_trip(make_dual_numbers<double>());
}

TEST_CASE("algebra documents are checked") {
  const std::string text = serialize_algebra(make_matrix_algebra<C>(2));
  CHECK(peek_ground_field(text) == GroundField::Complex);
  CHECK_THROWS_AS(parse_algebra<double>(text), std::invalid_argument);
  CHECK_THROWS_AS(parse_algebra<C>("{ not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_algebra<C>(R"({"ground_field": "complex", "dim": 2, "structure_constants": [1, 0], "unit": [1, 0]})"),
                  std::invalid_argument);
  // Non-associative constants in a well-formed document.
  std::string broken = serialize_algebra(make_block_algebra<double>({1, 1}));
  const auto pos = broken.find("\"structure_constants\": [");
  REQUIRE(pos != std::string::npos);
  broken.replace(pos, std::string("\"structure_constants\": [1").size(), "\"structure_constants\": [3");
  CHECK_THROWS_AS(parse_algebra<double>(broken), std::invalid_argument);
}

TEST_CASE("group action documents round-trip") {
  const auto action = make_cyclic_action<C>(4, grid_rotation_permutation(3), Matrix<C>::Identity(2, 2),
                                            conjugation_matrix(quarter_plane_rotation<C>(4, 1)));
  const std::string text = serialize_group_action(action);
  const auto back = parse_group_action<C>(text);
  CHECK(back.order() == 4);
  CHECK(back.base_permutations() == action.base_permutations());
  for (int g = 0; g < 4; ++g) CHECK((back.target_action(g) - action.target_action(g)).norm() == 0.0);
  CHECK(serialize_group_action(back) == text);
}

TEST_CASE("diagnostics table layout") {
  VertexDiagnostics d;
  d.vertex = 7;
  d.distance_to_z = 0.25;
  d.in_w = true;
  d.passed = true;
  d.status = "converged";
  d.defect = 1e-13;
  d.iterations = 3;
  std::ostringstream out;
  write_diagnostics_csv(out, {d});
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "vertex,distance_to_z,in_z,in_w,passed,status,defect,unit_defect,equivariance_defect,injectivity_margin,iterations");
  CHECK(row.rfind("7,2.50000000000000000e-01,0,1,1,converged,", 0) == 0);
  CHECK(row.substr(row.size() - 2) == ",3");
}
