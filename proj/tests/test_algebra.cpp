#include "doctest.h"

#include "prolong/algebra.hpp"
#include "prolong/germs.hpp"
#include "prolong/random.hpp"

using namespace prolong;
using C = std::complex<double>;

namespace {

// Hamilton's rules written out by hand: basis 1, i, j, k.
Eigen::Vector4d hamilton(const Eigen::Vector4d& p, const Eigen::Vector4d& q) {
  const double a1 = p(0), b1 = p(1), c1 = p(2), d1 = p(3);
  const double a2 = q(0), b2 = q(1), c2 = q(2), d2 = q(3);
  return {a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2, a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
          a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2, a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2};
}

}  // namespace

TEST_CASE("quaternion products match Hamilton's rules") {
  const auto h = make_matrix_algebra<double>(1, DivisionRing::Quaternion);
  REQUIRE(h.dim() == 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const Eigen::Vector4d x = Eigen::Vector4d::Unit(a), y = Eigen::Vector4d::Unit(b);
      CHECK((h.multiply(x, y) - hamilton(x, y)).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("quaternions are associative on all 64 basis triples") {
  const auto h = make_matrix_algebra<double>(1, DivisionRing::Quaternion);
  double worst = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        const Eigen::Vector4d x = Eigen::Vector4d::Unit(a), y = Eigen::Vector4d::Unit(b), z = Eigen::Vector4d::Unit(c);
        worst = std::max(worst, (h.multiply(h.multiply(x, y), z) - h.multiply(x, h.multiply(y, z))).norm());
      }
  CHECK(worst == 0.0);
  CHECK(h.associativity_defect() == 0.0);
}

TEST_CASE("quaternion involution is conjugation and norm is the Euclidean length") {
  const auto h = make_matrix_algebra<double>(1, DivisionRing::Quaternion);
  const Eigen::Vector4d q(1.0, 2.0, -3.0, 0.5);
  CHECK((h.star(q) - Eigen::Vector4d(1.0, -2.0, 3.0, -0.5)).norm() == 0.0);
  CHECK(h.element_norm(q) == doctest::Approx(q.norm()).epsilon(1e-14));
  CHECK(h.left_regular_norm(q) == doctest::Approx(q.norm()).epsilon(1e-14));
}

TEST_CASE("complex matrix algebra multiplies like matrices") {
  Rng rng(11);
  for (Index n = 1; n <= 4; ++n) {
    const auto a = make_matrix_algebra<C>(n);
    const Matrix<C> x = random_matrix<C>(n, n, rng), y = random_matrix<C>(n, n, rng);
    const Vector<C> prod = a.multiply(flatten_matrix(x), flatten_matrix(y));
    CHECK((unflatten_matrix(prod, n) - x * y).norm() <= 1e-13);
    CHECK((unflatten_matrix(a.star(flatten_matrix(x)), n) - x.adjoint()).norm() == 0.0);
    CHECK(a.element_norm(flatten_matrix(x)) == doctest::Approx(spectral_norm(x)).epsilon(1e-12));
    CHECK((a.unit() - flatten_matrix(Matrix<C>::Identity(n, n))).norm() == 0.0);
  }
}

TEST_CASE("real matrix algebras over R, C and H satisfy their laws") {
  for (auto ring : {DivisionRing::Real, DivisionRing::Complex, DivisionRing::Quaternion})
    for (Index n = 1; n <= 3; ++n) {
      const auto a = make_matrix_algebra<double>(n, ring);
      const Index d = ring == DivisionRing::Real ? 1 : ring == DivisionRing::Complex ? 2 : 4;
      CHECK(a.dim() == d * n * n);
      CHECK(a.associativity_defect() <= 1e-14);
      CHECK(a.unit_defect() <= 1e-14);
      CHECK(a.involution_defect() <= 1e-14);
    }
}

TEST_CASE("element norm agrees with the left-regular route") {
  Rng rng(5);
  std::vector<Algebra<double>> algebras = {make_matrix_algebra<double>(2, DivisionRing::Quaternion),
                                           make_matrix_algebra<double>(3, DivisionRing::Complex),
                                           direct_sum(make_matrix_algebra<double>(2, DivisionRing::Real),
                                                      make_matrix_algebra<double>(1, DivisionRing::Quaternion))};
  for (const auto& a : algebras)
    for (int t = 0; t < 5; ++t) {
      const Vector<double> x = random_vector<double>(a.dim(), rng);
      CHECK(a.element_norm(x) == doctest::Approx(a.left_regular_norm(x)).epsilon(1e-12));
    }
}

TEST_CASE("direct sum multiplies componentwise") {
  const auto a = make_matrix_algebra<C>(2);
  const auto b = make_matrix_algebra<C>(1);
  const auto s = direct_sum(a, b);
  CHECK(s.dim() == 5);
  CHECK(s.label() == "M2(C)+M1(C)");
  Rng rng(3);
  const Vector<C> x = random_vector<C>(5, rng), y = random_vector<C>(5, rng);
  Vector<C> expected(5);
  expected << a.multiply(x.head(4), y.head(4)), b.multiply(x.tail(1), y.tail(1));
  CHECK((s.multiply(x, y) - expected).norm() <= 1e-14);
  CHECK(s.element_norm(x) == doctest::Approx(std::max(a.element_norm(x.head(4)), b.element_norm(x.tail(1)))));
}

TEST_CASE("structure constants are validated") {
  auto flat = make_matrix_algebra<double>(2, DivisionRing::Real).flat_structure_constants();
  const Vector<double> unit = make_matrix_algebra<double>(2, DivisionRing::Real).unit();
  CHECK_NOTHROW(Algebra<double>::from_structure_constants(4, flat, unit));
  flat[1] += 0.5;  // e11 e11 gains an e12 component
  CHECK_THROWS_AS(Algebra<double>::from_structure_constants(4, flat, unit), std::invalid_argument);
  std::vector<double> short_list(10, 0.0);
  CHECK_THROWS_AS(Algebra<double>::from_structure_constants(4, short_list, unit), std::invalid_argument);
  CHECK_THROWS_AS(make_matrix_algebra<C>(2, DivisionRing::Quaternion), std::invalid_argument);
}

TEST_CASE("conjugation matrix implements g a g^-1") {
  Rng rng(8);
  const Matrix<C> g = random_invertible<C>(3, rng);
  const Matrix<C> a = random_matrix<C>(3, 3, rng);
  const Vector<C> image = conjugation_matrix(g) * flatten_matrix(a);
  CHECK((unflatten_matrix(image, 3) - g * a * g.inverse()).norm() <= 1e-12);
}

TEST_CASE("block algebras and standard embeddings") {
  const auto a = make_block_algebra<C>({1, 1});
  CHECK(a.dim() == 2);
  const Matrix<C> iota = standard_embedding<C>({1, 1}, 4);
  // (z1, z2) -> diag(z1, z1, z2, z2)
  const Vector<C> image = iota * Vector<C>((Vector<C>(2) << C(2), C(3)).finished());
  Matrix<C> expected = Matrix<C>::Zero(4, 4);
  expected.diagonal() << C(2), C(2), C(3), C(3);
  CHECK((unflatten_matrix(image, 4) - expected).norm() == 0.0);
  CHECK_THROWS_AS(standard_embedding<C>({1, 2}, 4), std::invalid_argument);
}
