#ifndef PROLONG_RECTIFIER_HPP
#define PROLONG_RECTIFIER_HPP

#include "prolong/separability.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace prolong {

/// A linear map between two algebras, as a (target dim x source dim)
/// coefficient matrix.
template <typename Scalar>
struct FiberMap {
  using AlgebraPtr = std::shared_ptr<const Algebra<Scalar>>;

  AlgebraPtr source;
  AlgebraPtr target;
  Matrix<Scalar> matrix;

  FiberMap() = default;
  FiberMap(AlgebraPtr src, AlgebraPtr tgt, Matrix<Scalar> m)
      : source(std::move(src)), target(std::move(tgt)), matrix(std::move(m)) {
    if (!source || !target) throw std::invalid_argument("FiberMap: null algebra");
    if (matrix.rows() != target->dim() || matrix.cols() != source->dim())
      throw std::invalid_argument("FiberMap: matrix shape does not match source/target dimensions");
  }

  template <typename Derived>
  Vector<Scalar> operator()(const Eigen::MatrixBase<Derived>& a) const {
    return matrix * a;
  }

  FiberMap with_matrix(Matrix<Scalar> m) const { return FiberMap(source, target, std::move(m)); }
};

enum class RectifyStatus { Converged, Diverged, MaxIter };

inline std::string to_string(RectifyStatus s) {
  switch (s) {
    case RectifyStatus::Converged: return "converged";
    case RectifyStatus::Diverged: return "diverged";
    case RectifyStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

template <typename Scalar>
struct RectifyResult {
  FiberMap<Scalar> map;
  std::vector<RealOf<Scalar>> defect_trace;
  int iterations = 0;
  RectifyStatus status = RectifyStatus::MaxIter;
};

/// Multiplication and unit bounds over a family of fibers.
struct UniformBounds {
  double K2 = 1;
  double K0 = 1;
};

inline constexpr double kDefaultRectifyTol = 1e-12;
inline constexpr int kDefaultRectifyMaxIter = 50;

/// Max over orthonormal source basis pairs (u, v) of ||phi(uv) - phi(u)phi(v)||.
template <typename Scalar>
RealOf<Scalar> multiplicativity_defect(const FiberMap<Scalar>& phi) {
  const auto& src = *phi.source;
  const auto& tgt = *phi.target;
  const Index n = src.dim();
  const Matrix<Scalar>& basis = src.orthonormalizer_inverse();
  const Matrix<Scalar> images = phi.matrix * basis;
  RealOf<Scalar> worst = 0;
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      const Vector<Scalar> lhs = phi.matrix * src.multiply(basis.col(p), basis.col(q));
      const Vector<Scalar> rhs = tgt.multiply(images.col(p), images.col(q));
      worst = std::max(worst, tgt.element_norm(lhs - rhs));
    }
  return worst;
}

/// One Newton-type correction a -> phi(a) + sum phi(e1) [phi(e2 a) - phi(e2) phi(a)].
template <typename Scalar>
FiberMap<Scalar> tau_step(const FiberMap<Scalar>& phi, const SeparabilityIdempotent<Scalar>& e) {
  const auto& src = *phi.source;
  const auto& tgt = *phi.target;
  const Index n = src.dim();
  const Index m = tgt.dim();
  if (e.coeffs.rows() != n || e.coeffs.cols() != n)
    throw std::invalid_argument("tau_step: separability idempotent does not match the source algebra");
  const Matrix<Scalar>& M = phi.matrix;

  // phi(b_j b_q) for all pairs, stored column-major per j.
  std::vector<Matrix<Scalar>> phi_products(static_cast<std::size_t>(n), Matrix<Scalar>::Zero(m, n));
  for (const auto& t : src.terms()) phi_products[static_cast<std::size_t>(t.i)].col(t.j) += t.value * M.col(t.k);

  // z_i(q) = sum_j E[i][j] (phi(b_j b_q) - phi(b_j) phi(b_q))
  std::vector<Matrix<Scalar>> z(static_cast<std::size_t>(n), Matrix<Scalar>::Zero(m, n));
  for (Index j = 0; j < n; ++j) {
    Matrix<Scalar> defect = phi_products[static_cast<std::size_t>(j)];
    for (Index q = 0; q < n; ++q) defect.col(q) -= tgt.multiply(M.col(j), M.col(q));
    for (Index i = 0; i < n; ++i)
      if (e.coeffs(i, j) != Scalar(0)) z[static_cast<std::size_t>(i)] += e.coeffs(i, j) * defect;
  }

  Matrix<Scalar> correction = Matrix<Scalar>::Zero(m, n);
  for (Index i = 0; i < n; ++i)
    for (Index q = 0; q < n; ++q) correction.col(q) += tgt.multiply(M.col(i), z[static_cast<std::size_t>(i)].col(q));
  return phi.with_matrix(M + correction);
}

/// a -> phi(a*)*.
template <typename Scalar>
FiberMap<Scalar> star_of_map(const FiberMap<Scalar>& phi) {
  const auto& si = phi.source->involution();
  const auto& ti = phi.target->involution();
  if (!si || !ti) throw std::logic_error("star_of_map: source and target need involutions");
  if (si->conjugate_linear != ti->conjugate_linear)
    throw std::logic_error("star_of_map: involutions disagree on conjugate-linearity");
  if (si->conjugate_linear)
    return phi.with_matrix(ti->matrix * phi.matrix.conjugate() * si->matrix.conjugate());
  return phi.with_matrix(ti->matrix * phi.matrix * si->matrix);
}

/// (tau + tau*) / 2 with tau* phi = (tau(phi*))*.
template <typename Scalar>
FiberMap<Scalar> tau_sa_step(const FiberMap<Scalar>& phi, const SeparabilityIdempotent<Scalar>& e) {
  const FiberMap<Scalar> plain = tau_step(phi, e);
  const FiberMap<Scalar> starred = star_of_map(tau_step(star_of_map(phi), e));
  return phi.with_matrix((plain.matrix + starred.matrix) / Scalar(2));
}

/// Unit coordinate functional: normalized regular trace Tr(a) / dim.
template <typename Scalar>
Vector<Scalar> unit_functional(const Algebra<Scalar>& algebra) {
  const auto trace = regular_trace(algebra);
  return trace.trace_vector / Scalar(RealOf<Scalar>(algebra.dim()));
}

/// a -> phi(a) + eps(a) (1 - phi(1)), eps the unit coordinate.
template <typename Scalar>
FiberMap<Scalar> unitalize(const FiberMap<Scalar>& phi) {
  const Vector<Scalar> gap = phi.target->unit() - phi.matrix * phi.source->unit();
  if (gap.isZero(0)) return phi;
  const Vector<Scalar> eps = unit_functional(*phi.source);
  return phi.with_matrix(phi.matrix + gap * eps.transpose());
}

/// Smallest singular value in orthonormalized coordinates.
template <typename Scalar>
RealOf<Scalar> injectivity_margin(const FiberMap<Scalar>& phi) {
  if (phi.matrix.rows() < phi.matrix.cols()) return 0;
  return smallest_singular_value(
      Matrix<Scalar>(phi.target->orthonormalizer() * phi.matrix * phi.source->orthonormalizer_inverse()));
}

/// Spectral norm of phi - psi in orthonormalized coordinates.
template <typename Scalar>
RealOf<Scalar> map_distance(const FiberMap<Scalar>& phi, const FiberMap<Scalar>& psi) {
  return spectral_norm(
      Matrix<Scalar>(phi.target->orthonormalizer() * (phi.matrix - psi.matrix) * phi.source->orthonormalizer_inverse()));
}

/// Iterates tau (or tau_sa) until the multiplicativity defect drops to tol.
/// Two consecutive defect increases stop the run with status Diverged.
template <typename Scalar>
RectifyResult<Scalar> rectify(const FiberMap<Scalar>& phi, const SeparabilityIdempotent<Scalar>& e,
                              bool star_mode = false, RealOf<Scalar> tol = kDefaultRectifyTol,
                              int max_iter = kDefaultRectifyMaxIter) {
  if (!(tol > 0)) throw std::invalid_argument("rectify: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("rectify: max_iter must be at least 1");
  RectifyResult<Scalar> result{phi, {}, 0, RectifyStatus::MaxIter};
  int increases = 0;
  for (;;) {
    const auto defect = multiplicativity_defect(result.map);
    if (!result.defect_trace.empty() && defect > result.defect_trace.back())
      ++increases;
    else
      increases = 0;
    result.defect_trace.push_back(defect);
    if (!std::isfinite(defect) || increases >= 2) {
      result.status = RectifyStatus::Diverged;
      return result;
    }
    if (defect <= tol) {
      result.status = RectifyStatus::Converged;
      return result;
    }
    if (result.iterations >= max_iter) {
      result.status = RectifyStatus::MaxIter;
      return result;
    }
    result.map = star_mode ? tau_sa_step(result.map, e) : tau_step(result.map, e);
    ++result.iterations;
  }
}

}  // namespace prolong

#endif  // PROLONG_RECTIFIER_HPP
