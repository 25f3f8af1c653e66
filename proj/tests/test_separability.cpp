#include "doctest.h"

#include "prolong/germs.hpp"
#include "prolong/random.hpp"
#include "prolong/separability.hpp"

using namespace prolong;
using C = std::complex<double>;

namespace {

// a.e - e.a computed directly from products of basis elements.
template <typename Scalar>
double brute_centrality(const Algebra<Scalar>& alg, const Matrix<Scalar>& e, const Vector<Scalar>& a) {
  const Index n = alg.dim();
  Matrix<Scalar> diff = Matrix<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (e(i, j) == Scalar(0)) continue;
      const Vector<Scalar> left = alg.multiply(a, alg.basis_vector(i));
      const Vector<Scalar> right = alg.multiply(alg.basis_vector(j), a);
      diff += e(i, j) * (left * alg.basis_vector(j).transpose() - alg.basis_vector(i) * right.transpose());
    }
  return diff.cwiseAbs().maxCoeff();
}

template <typename Scalar>
Vector<Scalar> brute_multiplied(const Algebra<Scalar>& alg, const Matrix<Scalar>& e) {
  Vector<Scalar> out = alg.zero();
  for (Index i = 0; i < alg.dim(); ++i)
    for (Index j = 0; j < alg.dim(); ++j) out += e(i, j) * alg.multiply(alg.basis_vector(i), alg.basis_vector(j));
  return out;
}

}  // namespace

TEST_CASE("regular trace of M_n(C)") {
  for (Index n = 1; n <= 3; ++n) {
    const auto a = make_matrix_algebra<C>(n);
    const auto t = regular_trace(a);
    for (Index r = 0; r < n; ++r)
      for (Index s = 0; s < n; ++s) CHECK(std::abs(t.trace_vector(r * n + s) - C(r == s ? double(n) : 0.0)) == 0.0);
    // Tr(e_rs e_uv) = n delta_su delta_rv
    for (Index i = 0; i < n * n; ++i)
      for (Index j = 0; j < n * n; ++j) {
        const Index r = i / n, s = i % n, u = j / n, v = j % n;
        CHECK(std::abs(t.gram(i, j) - C(s == u && r == v ? double(n) : 0.0)) == 0.0);
      }
  }
}

TEST_CASE("Gram matrix of the quaternions") {
  const auto h = make_matrix_algebra<double>(1, DivisionRing::Quaternion);
  Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
  expected.diagonal() << 4, -4, -4, -4;
  CHECK((regular_trace(h).gram - expected).norm() == 0.0);
}

TEST_CASE("semisimplicity check") {
  CHECK(semisimplicity_check(make_matrix_algebra<C>(3)).semisimple);
  CHECK(semisimplicity_check(make_block_algebra<C>({1, 2})).semisimple);
  const auto dual = make_dual_numbers<double>();
  CHECK_FALSE(semisimplicity_check(dual).semisimple);
  CHECK_THROWS_AS(separability_idempotent(dual), std::domain_error);
}

TEST_CASE("closed form on M_n(C)") {
  for (Index n = 1; n <= 4; ++n) {
    const auto e = separability_idempotent(make_matrix_algebra<C>(n));
    Matrix<C> expected = Matrix<C>::Zero(n * n, n * n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) expected(i * n + j, j * n + i) = C(1.0 / double(n));
    CHECK((e.coeffs - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("canonical idempotent of C^2 is e1 x e1 + e2 x e2") {
  const auto e = separability_idempotent(make_block_algebra<C>({1, 1}));
  CHECK((e.coeffs - Matrix<C>::Identity(2, 2)).norm() <= 1e-15);
}

TEST_CASE("both separability conditions hold on random elements") {
  Rng rng(21);
  std::vector<Algebra<double>> real_algebras = {
      make_matrix_algebra<double>(2, DivisionRing::Quaternion), make_matrix_algebra<double>(2, DivisionRing::Complex),
      direct_sum(make_matrix_algebra<double>(1, DivisionRing::Real), make_matrix_algebra<double>(3, DivisionRing::Real))};
  for (const auto& a : real_algebras) {
    const auto e = separability_idempotent(a);
    for (int t = 0; t < 3; ++t) CHECK(brute_centrality(a, e.coeffs, random_vector<double>(a.dim(), rng)) <= 1e-12);
    CHECK((brute_multiplied(a, e.coeffs) - a.unit()).cwiseAbs().maxCoeff() <= 1e-12);
    const auto d = separability_defects(e);
    CHECK(d.centrality <= 1e-10);
    CHECK(d.unit <= 1e-10);
  }
  const auto m = make_block_algebra<C>({2, 1});
  const auto e = separability_idempotent(m);
  CHECK(brute_centrality(m, e.coeffs, random_vector<C>(m.dim(), rng)) <= 1e-12);
  CHECK((brute_multiplied(m, e.coeffs) - m.unit()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("defects detect a tensor that is not separable") {
  const auto a = make_matrix_algebra<C>(2);
  const Matrix<C> bad = Matrix<C>::Identity(4, 4);
  const auto d = separability_defects(a, bad);
  CHECK(d.centrality > 0.1);
}

TEST_CASE("inner automorphisms fix the canonical idempotent") {
  Rng rng(4);
  const auto e = separability_idempotent(make_matrix_algebra<C>(4));
  for (int t = 0; t < 10; ++t) {
    const Matrix<C> alpha = conjugation_matrix(random_invertible<C>(4, rng));
    CHECK((tensor_apply(alpha, e.coeffs) - e.coeffs).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("star symmetrization") {
  const auto a = std::make_shared<const Algebra<C>>(make_block_algebra<C>({1, 1}));
  auto e = separability_idempotent(a);
  CHECK(flip_star_defect(star_symmetrize(e)) <= 1e-12);
  // An antisymmetric addition is removed by symmetrization.
  for (double t : {0.0, 0.3, -1.7}) {
    SeparabilityIdempotent<C> perturbed{a, e.coeffs};
    perturbed.coeffs(0, 1) += C(t);
    perturbed.coeffs(1, 0) -= C(t);
    CHECK((star_symmetrize(perturbed).coeffs - e.coeffs).norm() <= 1e-15);
  }
  const auto h = separability_idempotent(make_matrix_algebra<double>(2, DivisionRing::Quaternion));
  CHECK(flip_star_defect(star_symmetrize(h)) <= 1e-12);
  CHECK_THROWS_AS(star_symmetrize(separability_idempotent(Algebra<double>::from_terms(
                      1, {{0, 0, 0, 1.0}}, Vector<double>::Ones(1), std::nullopt, std::nullopt, "k"))),
                  std::logic_error);
}
