#include "doctest.h"

#include "prolong/base_complex.hpp"
#include "prolong/equivariance.hpp"
#include "prolong/germs.hpp"
#include "prolong/random.hpp"

#include <numbers>

using namespace prolong;
using C = std::complex<double>;

TEST_CASE("group axioms are enforced") {
  const std::vector<int> id = {0, 1};
  const std::vector<Matrix<double>> one(2, Matrix<double>::Identity(1, 1));
  // Z/2 is fine.
  CHECK_NOTHROW(GroupAction<double>({{0, 1}, {1, 0}}, {id, {1, 0}}, one, one));
  // No inverse for element 1.
  CHECK_THROWS_AS(GroupAction<double>({{0, 1}, {1, 1}}, {id, id}, one, one), std::invalid_argument);
  // Base action not a homomorphism: the nontrivial element acts trivially squared... swap twice must be identity.
  CHECK_THROWS_AS(GroupAction<double>({{0, 1}, {1, 0}}, {{1, 0}, id}, one, one), std::invalid_argument);
  // Fiber action not a homomorphism: -2 squared is not 1.
  std::vector<Matrix<double>> bad = {Matrix<double>::Identity(1, 1), Matrix<double>::Constant(1, 1, -2.0)};
  CHECK_THROWS_AS(GroupAction<double>({{0, 1}, {1, 0}}, {id, {1, 0}}, one, bad), std::invalid_argument);
}

TEST_CASE("cyclic action orders are checked") {
  const auto perm = grid_rotation_permutation(3);
  CHECK_NOTHROW(make_cyclic_action<double>(4, perm, Matrix<double>::Identity(1, 1), quarter_plane_rotation<double>(2, 1)));
  CHECK_THROWS_AS(make_cyclic_action<double>(2, perm, Matrix<double>::Identity(1, 1), Matrix<double>::Identity(2, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_cyclic_action<double>(4, perm, Matrix<double>::Identity(1, 1), Matrix<double>::Constant(2, 2, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("averaging produces an equivariant family and fixes equivariant ones") {
  Rng rng(12);
  const auto action = make_cyclic_action<C>(4, grid_rotation_permutation(5), conjugation_matrix(quarter_plane_rotation<C>(2, 1)),
                                            conjugation_matrix(quarter_plane_rotation<C>(4, 1)));
  MapFamily<C> family;
  for (int x = 0; x < 25; ++x) family.emplace(x, random_matrix<C>(16, 4, rng));
  CHECK(equivariance_defect(action, family) > 0.1);
  const auto averaged = average_map_family(action, family);
  CHECK(equivariance_defect(action, averaged) <= 1e-12);
  const auto twice = average_map_family(action, averaged);
  for (const auto& [x, m] : averaged) CHECK((twice.at(x) - m).norm() <= 1e-13);

  family.erase(3);
  CHECK_THROWS_AS(average_map_family(action, family), std::invalid_argument);
}

TEST_CASE("averaging by hand for Z/2 swapping two vertices") {
  const std::vector<Matrix<double>> src = {Matrix<double>::Identity(1, 1), Matrix<double>::Identity(1, 1)};
  const std::vector<Matrix<double>> tgt = {Matrix<double>::Identity(1, 1), Matrix<double>::Constant(1, 1, -1.0)};
  const GroupAction<double> action({{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}, src, tgt);
  MapFamily<double> f = {{0, Matrix<double>::Constant(1, 1, 3.0)}, {1, Matrix<double>::Constant(1, 1, 1.0)}};
  const auto a = average_map_family(action, f);
  // x=0: (3 + (-1)*1)/2 = 1; x=1: (1 + (-1)*3)/2 = -1.
  CHECK(a.at(0)(0, 0) == doctest::Approx(1.0));
  CHECK(a.at(1)(0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("trapezoid average is exact for low frequencies") {
  for (int samples : {3, 4, 8}) {
    for (int k = 1; k < samples; ++k) {
      const auto avg = haar_average_circle<double>(samples, [k](double t) {
        Matrix<double> m(1, 2);
        m << std::cos(k * t), std::sin(k * t);
        return m;
      });
      CHECK(avg.norm() <= 1e-14);
    }
    const auto constant = haar_average_circle<double>(samples, [](double) { return Matrix<double>::Constant(1, 1, 2.5); });
    CHECK(constant(0, 0) == doctest::Approx(2.5));
  }
}

TEST_CASE("automorphism validation") {
  const auto m2 = make_matrix_algebra<C>(2);
  CHECK(automorphism_defect(m2, conjugation_matrix(quarter_plane_rotation<C>(2, 1))) <= 1e-14);
  Matrix<C> not_auto = Matrix<C>::Identity(4, 4);
  not_auto(1, 1) = C(2);
  CHECK(automorphism_defect(m2, not_auto) > 0.5);
}
