#ifndef PROLONG_RANDOM_HPP
#define PROLONG_RANDOM_HPP

#include "prolong/types.hpp"

#include <random>

namespace prolong {

using Rng = std::mt19937_64;

/// i.i.d. standard normal entries (complex: real and imaginary parts each
/// with variance 1/2).
template <typename Scalar>
Matrix<Scalar> random_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix<Scalar> m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      if constexpr (is_complex_v<Scalar>) {
        const double re = normal(rng);
        const double im = normal(rng);
        m(r, c) = Scalar(re, im) / std::sqrt(2.0);
      } else {
        m(r, c) = normal(rng);
      }
    }
  return m;
}

template <typename Scalar>
Vector<Scalar> random_vector(Index n, Rng& rng) {
  return random_matrix<Scalar>(n, 1, rng);
}

/// Haar-distributed unitary (orthogonal) matrix via QR with sign fix.
template <typename Scalar>
Matrix<Scalar> random_unitary(Index n, Rng& rng) {
  const Matrix<Scalar> g = random_matrix<Scalar>(n, n, rng);
  Eigen::HouseholderQR<Matrix<Scalar>> qr(g);
  Matrix<Scalar> q = qr.householderQ();
  const Matrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const auto d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / Scalar(std::abs(d));
  }
  return q;
}

/// Well-conditioned invertible matrix: identity plus a scaled Gaussian.
template <typename Scalar>
Matrix<Scalar> random_invertible(Index n, Rng& rng, double spread = 0.3) {
  return Matrix<Scalar>::Identity(n, n) + Scalar(spread / std::sqrt(double(n))) * random_matrix<Scalar>(n, n, rng);
}

/// Unit spectral-norm noise for perturbation studies.
template <typename Scalar>
Matrix<Scalar> unit_noise(Index rows, Index cols, Rng& rng) {
  Matrix<Scalar> m = random_matrix<Scalar>(rows, cols, rng);
  return m / Scalar(spectral_norm(m));
}

}  // namespace prolong

#endif  // PROLONG_RANDOM_HPP
