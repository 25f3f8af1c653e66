#ifndef PROLONG_SEPARABILITY_HPP
#define PROLONG_SEPARABILITY_HPP

#include "prolong/algebra.hpp"

#include <memory>

namespace prolong {

/// Regular trace data: Tr(b_i) and the trace form G[i][j] = Tr(b_i b_j).
template <typename Scalar>
struct TraceData {
  Vector<Scalar> trace_vector;
  Matrix<Scalar> gram;
  RealOf<Scalar> condition_number;
};

template <typename Scalar>
TraceData<Scalar> regular_trace(const Algebra<Scalar>& algebra) {
  const Index n = algebra.dim();
  TraceData<Scalar> data;
  data.trace_vector.resize(n);
  for (Index i = 0; i < n; ++i) data.trace_vector(i) = algebra.left_multiplication(algebra.basis_vector(i)).trace();
  data.gram = Matrix<Scalar>::Zero(n, n);
  for (const auto& t : algebra.terms()) data.gram(t.i, t.j) += t.value * data.trace_vector(t.k);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(data.gram);
  const auto& s = svd.singularValues();
  const auto smallest = s(s.size() - 1);
  data.condition_number = smallest > 0 ? s(0) / smallest : std::numeric_limits<RealOf<Scalar>>::infinity();
  return data;
}

template <typename Scalar>
struct SemisimplicityReport {
  bool semisimple;
  RealOf<Scalar> condition_number;
  /// sigma_min / sigma_max of the trace form.
  RealOf<Scalar> relative_gap;
  /// Set when relative_gap lies within two decades of the threshold.
  bool near_threshold;
};

inline constexpr double kDefaultSemisimplicityTol = 1e-8;

/// Nondegeneracy of the regular trace form.
template <typename Scalar>
SemisimplicityReport<Scalar> semisimplicity_check(const Algebra<Scalar>& algebra,
                                                  RealOf<Scalar> tol = kDefaultSemisimplicityTol) {
  if (!(tol > 0)) throw std::invalid_argument("semisimplicity tolerance must be positive");
  const auto trace = regular_trace(algebra);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(trace.gram);
  const auto& s = svd.singularValues();
  const RealOf<Scalar> gap = s(0) > 0 ? s(s.size() - 1) / s(0) : RealOf<Scalar>(0);
  SemisimplicityReport<Scalar> report;
  report.semisimple = gap > tol;
  report.condition_number = trace.condition_number;
  report.relative_gap = gap;
  report.near_threshold = gap > tol / 100 && gap < tol * 100;
  return report;
}

/// An element e = sum E[i][j] b_i (x) b_j of A (x) A.
template <typename Scalar>
struct SeparabilityIdempotent {
  std::shared_ptr<const Algebra<Scalar>> algebra;
  Matrix<Scalar> coeffs;
};

/// m . e (left action on the first leg), as a coefficient matrix.
template <typename Scalar, typename Derived>
Matrix<Scalar> left_act(const Algebra<Scalar>& algebra, const Eigen::MatrixBase<Derived>& m,
                        const Matrix<Scalar>& tensor) {
  Matrix<Scalar> out = Matrix<Scalar>::Zero(tensor.rows(), tensor.cols());
  for (const auto& t : algebra.terms())
    if (m(t.i) != Scalar(0)) out.row(t.k) += (m(t.i) * t.value) * tensor.row(t.j);
  return out;
}

/// e . m (right action on the second leg).
template <typename Scalar, typename Derived>
Matrix<Scalar> right_act(const Algebra<Scalar>& algebra, const Matrix<Scalar>& tensor,
                         const Eigen::MatrixBase<Derived>& m) {
  Matrix<Scalar> out = Matrix<Scalar>::Zero(tensor.rows(), tensor.cols());
  for (const auto& t : algebra.terms())
    if (m(t.j) != Scalar(0)) out.col(t.k) += (m(t.j) * t.value) * tensor.col(t.i);
  return out;
}

/// mult(e) = sum E[i][j] b_i b_j.
template <typename Scalar>
Vector<Scalar> tensor_product_image(const Algebra<Scalar>& algebra, const Matrix<Scalar>& tensor) {
  Vector<Scalar> out = Vector<Scalar>::Zero(algebra.dim());
  for (const auto& t : algebra.terms()) out(t.k) += tensor(t.i, t.j) * t.value;
  return out;
}

/// Legwise star (x (x) y)* = x* (x) y*.
template <typename Scalar>
Matrix<Scalar> tensor_star(const Algebra<Scalar>& algebra, const Matrix<Scalar>& tensor) {
  if (!algebra.involution()) throw std::logic_error("tensor_star: algebra has no involution");
  const auto& inv = *algebra.involution();
  const Matrix<Scalar> base = inv.conjugate_linear ? Matrix<Scalar>(tensor.conjugate()) : tensor;
  return inv.matrix * base * inv.matrix.transpose();
}

/// Tensor flip x (x) y -> y (x) x.
template <typename Scalar>
Matrix<Scalar> tensor_flip(const Matrix<Scalar>& tensor) {
  return tensor.transpose();
}

/// (alpha (x) alpha)(e) for a linear map alpha given by its matrix.
template <typename Scalar>
Matrix<Scalar> tensor_apply(const Matrix<Scalar>& alpha, const Matrix<Scalar>& tensor) {
  return alpha * tensor * alpha.transpose();
}

/// Frobenius norm of a tensor in orthonormalized coordinates on both legs.
template <typename Scalar>
RealOf<Scalar> tensor_norm(const Algebra<Scalar>& algebra, const Matrix<Scalar>& tensor) {
  const auto& r = algebra.orthonormalizer();
  if (r.isIdentity(0)) return tensor.norm();
  return (r.template triangularView<Eigen::Upper>() * tensor * r.transpose().template triangularView<Eigen::Lower>()).norm();
}

/// Canonical separability idempotent built from the trace form: the
/// dual-basis tensor sum_i b_i (x) b_i^dual, whose coefficients are G^{-1}.
///
/// Throws std::domain_error when the trace form is degenerate.
template <typename Scalar>
SeparabilityIdempotent<Scalar> separability_idempotent(std::shared_ptr<const Algebra<Scalar>> algebra,
                                                       RealOf<Scalar> tol = kDefaultSemisimplicityTol) {
  if (!algebra) throw std::invalid_argument("separability_idempotent: null algebra");
  const auto report = semisimplicity_check(*algebra, tol);
  if (!report.semisimple)
    throw std::domain_error("algebra '" + algebra->label() + "' is not semisimple (trace form is degenerate)");
  const auto trace = regular_trace(*algebra);
  const Index n = algebra->dim();
  // Dual basis: Tr(b_j g_i) = delta_ij with g_i = sum_k H[k][i] b_k gives G H = I.
  const Matrix<Scalar> h = trace.gram.fullPivLu().solve(Matrix<Scalar>::Identity(n, n));
  // e = sum_i b_i (x) g_i, so E[i][k] = H[k][i].
  return {std::move(algebra), h.transpose()};
}

template <typename Scalar>
SeparabilityIdempotent<Scalar> separability_idempotent(const Algebra<Scalar>& algebra,
                                                       RealOf<Scalar> tol = kDefaultSemisimplicityTol) {
  return separability_idempotent(std::make_shared<const Algebra<Scalar>>(algebra), tol);
}

/// (e + sigma(e)*) / 2.
template <typename Scalar>
SeparabilityIdempotent<Scalar> star_symmetrize(const SeparabilityIdempotent<Scalar>& e) {
  if (!e.algebra->has_involution())
    throw std::logic_error("star_symmetrize: algebra '" + e.algebra->label() + "' has no involution");
  Matrix<Scalar> sym = (e.coeffs + tensor_star(*e.algebra, tensor_flip(e.coeffs))) / Scalar(2);
  return {e.algebra, std::move(sym)};
}

/// ||e* - sigma(e)||.
template <typename Scalar>
RealOf<Scalar> flip_star_defect(const SeparabilityIdempotent<Scalar>& e) {
  return tensor_norm(*e.algebra, Matrix<Scalar>(tensor_star(*e.algebra, e.coeffs) - tensor_flip(e.coeffs)));
}

template <typename Scalar>
struct SeparabilityDefects {
  RealOf<Scalar> centrality;
  RealOf<Scalar> unit;
};

template <typename Scalar>
SeparabilityDefects<Scalar> separability_defects(const Algebra<Scalar>& algebra, const Matrix<Scalar>& tensor) {
  const Index n = algebra.dim();
  if (tensor.rows() != n || tensor.cols() != n)
    throw std::invalid_argument("separability_defects: tensor must be dim x dim");
  SeparabilityDefects<Scalar> d{0, 0};
  const auto& r = algebra.orthonormalizer_inverse();
  for (Index m = 0; m < n; ++m) {
    // Orthonormal basis element m.
    const Vector<Scalar> u = r.col(m);
    const Matrix<Scalar> diff = left_act(algebra, u, tensor) - right_act(algebra, tensor, u);
    d.centrality = std::max(d.centrality, tensor_norm(algebra, diff));
  }
  d.unit = algebra.element_norm(tensor_product_image(algebra, tensor) - algebra.unit());
  return d;
}

template <typename Scalar>
SeparabilityDefects<Scalar> separability_defects(const SeparabilityIdempotent<Scalar>& e) {
  return separability_defects(*e.algebra, e.coeffs);
}

}  // namespace prolong

#endif  // PROLONG_SEPARABILITY_HPP
