#ifndef PROLONG_TYPES_HPP
#define PROLONG_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <type_traits>

namespace prolong {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

template <typename Scalar>
inline constexpr bool is_complex_v = Eigen::NumTraits<Scalar>::IsComplex;

using Index = Eigen::Index;

enum class GroundField { Real, Complex };

template <typename Scalar>
constexpr GroundField ground_field_of() {
  return is_complex_v<Scalar> ? GroundField::Complex : GroundField::Real;
}

/// Largest singular value; zero for empty matrices.
template <typename Derived>
RealOf<typename Derived::Scalar> spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  if (m.cols() == 1 || m.rows() == 1) return m.norm();
  using S = typename Derived::Scalar;
  // Largest eigenvalue of the smaller Gram matrix, after scaling to avoid
  // under- and overflow; relative accuracy is that of the eigenvalue.
  const RealOf<S> scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0)) return scale == 0 ? RealOf<S>(0) : scale;
  const Matrix<S> a = m / S(scale);
  const Matrix<S> gram = a.rows() < a.cols() ? Matrix<S>(a * a.adjoint()) : Matrix<S>(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<Matrix<S>> eig(gram, Eigen::EigenvaluesOnly);
  return scale * std::sqrt(std::max(RealOf<S>(0), eig.eigenvalues().maxCoeff()));
}

/// Smallest singular value of an (N x n) matrix with N >= n.
template <typename Derived>
RealOf<typename Derived::Scalar> smallest_singular_value(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix<typename Derived::Scalar>> svd(m);
  const auto& s = svd.singularValues();
  if (m.rows() < m.cols()) return 0;
  return s(s.size() - 1);
}

}  // namespace prolong

#endif  // PROLONG_TYPES_HPP
