#ifndef PROLONG_ALGEBRA_HPP
#define PROLONG_ALGEBRA_HPP

#include "prolong/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prolong {

enum class DivisionRing { Real, Complex, Quaternion };

/// A finite-dimensional unital associative algebra over R or C, given by
/// structure constants b_i b_j = sum_k c[i][j][k] b_k in a fixed basis.
///
/// Values are immutable once built. Every public constructor validates
/// associativity, the unit law and (when present) the involution laws.
template <typename Scalar>
class Algebra {
 public:
  using Real = RealOf<Scalar>;
  using Complex = std::complex<Real>;
  using MatrixType = Matrix<Scalar>;
  using VectorType = Vector<Scalar>;
  using ComplexMatrix = Matrix<Complex>;

  /// One nonzero structure constant.
  struct Term {
    Index i, j, k;
    Scalar value;
  };

  /// a* = matrix * a, or matrix * conj(a) when conjugate_linear.
  struct Involution {
    MatrixType matrix;
    bool conjugate_linear = false;
  };

  /// A faithful matrix representation whose operator norm reproduces the
  /// left-regular spectral norm on (A, inner product). images[i] is the
  /// image of basis element i.
  struct NormBlock {
    std::vector<ComplexMatrix> images;
  };

  /// Nonzero entries of a NormBlock, flattened over basis index.
  struct SparseBlock {
    struct Entry {
      Index basis, row, col;
      Complex value;
    };
    Index size = 0;
    std::vector<Entry> entries;
  };

  static constexpr Real kLawTolerance = Real(1e-12);

  /// Builds an algebra from a flat row-major (i, j, k) list of dim^3 constants.
  static Algebra from_structure_constants(Index dim, std::span<const Scalar> flat, VectorType unit,
                                          std::optional<Involution> involution = std::nullopt,
                                          std::optional<MatrixType> inner_product = std::nullopt,
                                          std::string label = "custom") {
    if (dim < 1) throw std::invalid_argument("algebra dimension must be positive");
    if (static_cast<Index>(flat.size()) != dim * dim * dim)
      throw std::invalid_argument("structure constant list must have dim^3 entries");
    std::vector<Term> terms;
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j)
        for (Index k = 0; k < dim; ++k) {
          const Scalar c = flat[static_cast<std::size_t>((i * dim + j) * dim + k)];
          if (c != Scalar(0)) terms.push_back({i, j, k, c});
        }
    MatrixType gram = inner_product ? *inner_product : MatrixType::Identity(dim, dim);
    Algebra a(dim, std::move(terms), std::move(unit), std::move(involution), std::move(gram),
              {}, std::move(label));
    a.validate();
    return a;
  }

  /// Same as from_structure_constants but from a sparse term list.
  static Algebra from_terms(Index dim, std::vector<Term> terms, VectorType unit,
                            std::optional<Involution> involution = std::nullopt,
                            std::optional<MatrixType> inner_product = std::nullopt,
                            std::string label = "custom") {
    if (dim < 1) throw std::invalid_argument("algebra dimension must be positive");
    for (const auto& t : terms)
      if (t.i < 0 || t.j < 0 || t.k < 0 || t.i >= dim || t.j >= dim || t.k >= dim)
        throw std::invalid_argument("structure constant index out of range");
    MatrixType gram = inner_product ? *inner_product : MatrixType::Identity(dim, dim);
    Algebra a(dim, std::move(terms), std::move(unit), std::move(involution), std::move(gram),
              {}, std::move(label));
    a.validate();
    return a;
  }

  Index dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const std::vector<Term>& terms() const { return terms_; }
  const VectorType& unit() const { return unit_; }
  const std::optional<Involution>& involution() const { return involution_; }
  bool has_involution() const { return involution_.has_value(); }
  const MatrixType& inner_product() const { return gram_; }
  const std::vector<NormBlock>& norm_blocks() const { return blocks_; }

  /// Upper Cholesky factor R of the inner product (G = R^H R); coordinates
  /// R a are orthonormal.
  const MatrixType& orthonormalizer() const { return chol_; }
  const MatrixType& orthonormalizer_inverse() const { return chol_inv_; }

  VectorType basis_vector(Index i) const { return VectorType::Unit(dim_, i); }
  VectorType zero() const { return VectorType::Zero(dim_); }

  /// Dense c[i][j][k] in row-major order.
  std::vector<Scalar> flat_structure_constants() const {
    std::vector<Scalar> flat(static_cast<std::size_t>(dim_ * dim_ * dim_), Scalar(0));
    for (const auto& t : terms_) flat[static_cast<std::size_t>((t.i * dim_ + t.j) * dim_ + t.k)] += t.value;
    return flat;
  }

  template <typename DerivedA, typename DerivedB>
  VectorType multiply(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) const {
    if (a.size() != dim_ || b.size() != dim_)
      throw std::invalid_argument("multiply: coefficient vector length does not match algebra dimension");
    VectorType out = VectorType::Zero(dim_);
    for (const auto& t : terms_) out(t.k) += a(t.i) * b(t.j) * t.value;
    return out;
  }

  /// Matrix of x -> a x.
  template <typename Derived>
  MatrixType left_multiplication(const Eigen::MatrixBase<Derived>& a) const {
    check_length(a.size());
    MatrixType m = MatrixType::Zero(dim_, dim_);
    for (const auto& t : terms_) m(t.k, t.j) += a(t.i) * t.value;
    return m;
  }

  /// Matrix of x -> x b.
  template <typename Derived>
  MatrixType right_multiplication(const Eigen::MatrixBase<Derived>& b) const {
    check_length(b.size());
    MatrixType m = MatrixType::Zero(dim_, dim_);
    for (const auto& t : terms_) m(t.k, t.i) += b(t.j) * t.value;
    return m;
  }

  template <typename Derived>
  VectorType star(const Eigen::MatrixBase<Derived>& a) const {
    if (!involution_) throw std::logic_error("algebra '" + label_ + "' has no involution");
    check_length(a.size());
    if (involution_->conjugate_linear) return involution_->matrix * a.conjugate();
    return involution_->matrix * a;
  }

  /// Operator norm of left multiplication by a on (A, inner product).
  template <typename Derived>
  Real element_norm(const Eigen::MatrixBase<Derived>& a) const {
    check_length(a.size());
    Real best = 0;
    for (const auto& block : sparse_blocks_) {
      ComplexMatrix m = ComplexMatrix::Zero(block.size, block.size);
      for (const auto& e : block.entries) m(e.row, e.col) += Complex(a(e.basis)) * e.value;
      best = std::max(best, spectral_norm(m));
    }
    return best;
  }

  /// Spectral norm of the orthonormalized left-regular matrix; agrees with
  /// element_norm and is kept as an independent route for cross-checks.
  template <typename Derived>
  Real left_regular_norm(const Eigen::MatrixBase<Derived>& a) const {
    return spectral_norm(chol_ * left_multiplication(a) * chol_inv_);
  }

  /// Max deviation from associativity over all basis triples.
  Real associativity_defect() const {
    Real worst = 0;
    std::vector<MatrixType> left(static_cast<std::size_t>(dim_));
    for (Index i = 0; i < dim_; ++i) left[static_cast<std::size_t>(i)] = left_multiplication(basis_vector(i));
    for (Index i = 0; i < dim_; ++i)
      for (Index j = 0; j < dim_; ++j) {
        const VectorType bij = multiply(basis_vector(i), basis_vector(j));
        // (b_i b_j) b_k vs b_i (b_j b_k) for all k at once.
        const MatrixType lhs = left_multiplication(bij);
        const MatrixType rhs = left[static_cast<std::size_t>(i)] * left[static_cast<std::size_t>(j)];
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    return worst;
  }

  Real unit_defect() const {
    return std::max((left_multiplication(unit_) - MatrixType::Identity(dim_, dim_)).cwiseAbs().maxCoeff(),
                    (right_multiplication(unit_) - MatrixType::Identity(dim_, dim_)).cwiseAbs().maxCoeff());
  }

  /// Max over basis pairs of the involutive and anti-multiplicative laws.
  Real involution_defect() const {
    if (!involution_) return 0;
    Real worst = 0;
    for (Index i = 0; i < dim_; ++i) {
      const VectorType bi = basis_vector(i);
      worst = std::max(worst, (star(star(bi)) - bi).cwiseAbs().maxCoeff());
      for (Index j = 0; j < dim_; ++j) {
        const VectorType bj = basis_vector(j);
        const VectorType lhs = star(multiply(bi, bj));
        const VectorType rhs = multiply(star(bj), star(bi));
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
    return worst;
  }

  // Constructors used by the factory functions below; they skip validation.
  Algebra(Index dim, std::vector<Term> terms, VectorType unit, std::optional<Involution> involution,
          MatrixType gram, std::vector<NormBlock> blocks, std::string label)
      : dim_(dim),
        terms_(std::move(terms)),
        unit_(std::move(unit)),
        involution_(std::move(involution)),
        gram_(std::move(gram)),
        blocks_(std::move(blocks)),
        label_(std::move(label)) {
    if (unit_.size() != dim_) throw std::invalid_argument("unit vector length does not match dimension");
    if (gram_.rows() != dim_ || gram_.cols() != dim_)
      throw std::invalid_argument("inner product must be dim x dim");
    if (involution_ && (involution_->matrix.rows() != dim_ || involution_->matrix.cols() != dim_))
      throw std::invalid_argument("involution matrix must be dim x dim");
    if constexpr (!is_complex_v<Scalar>) {
      if (involution_) involution_->conjugate_linear = false;
    }
    Eigen::LLT<MatrixType> llt(gram_);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("inner product is not positive definite");
    chol_ = llt.matrixU();
    chol_inv_ = chol_.template triangularView<Eigen::Upper>().solve(MatrixType::Identity(dim_, dim_));
    if (blocks_.empty()) blocks_.push_back(left_regular_block());
    for (const auto& block : blocks_) {
      SparseBlock sparse;
      sparse.size = block.images.front().rows();
      for (Index i = 0; i < static_cast<Index>(block.images.size()); ++i) {
        const auto& image = block.images[static_cast<std::size_t>(i)];
        for (Index c = 0; c < image.cols(); ++c)
          for (Index r = 0; r < image.rows(); ++r)
            if (image(r, c) != Complex(0)) sparse.entries.push_back({i, r, c, image(r, c)});
      }
      sparse_blocks_.push_back(std::move(sparse));
    }
  }

 private:
  void check_length(Index n) const {
    if (n != dim_) throw std::invalid_argument("coefficient vector length does not match algebra dimension");
  }

  NormBlock left_regular_block() const {
    NormBlock block;
    block.images.reserve(static_cast<std::size_t>(dim_));
    for (Index i = 0; i < dim_; ++i) {
      const MatrixType l = chol_ * left_multiplication(basis_vector(i)) * chol_inv_;
      block.images.push_back(l.template cast<Complex>());
    }
    return block;
  }

  void validate() const {
    Real scale = 1;
    for (const auto& t : terms_) scale = std::max(scale, Real(std::abs(t.value)));
    const Real tol = kLawTolerance * scale * scale;
    if (associativity_defect() > tol) throw std::invalid_argument("structure constants are not associative");
    if (unit_defect() > tol) throw std::invalid_argument("unit vector does not satisfy the unit law");
    if (involution_defect() > tol) throw std::invalid_argument("involution is not an anti-multiplicative involution");
    if (!gram_.isApprox(gram_.adjoint(), Real(1e-12))) throw std::invalid_argument("inner product is not self-adjoint");
  }

  Index dim_;
  std::vector<Term> terms_;
  VectorType unit_;
  std::optional<Involution> involution_;
  MatrixType gram_;
  MatrixType chol_;
  MatrixType chol_inv_;
  std::vector<NormBlock> blocks_;
  std::vector<SparseBlock> sparse_blocks_;
  std::string label_;
};

namespace detail {

// Units of a division ring over R: 1, i (complex); 1, i, j, k (quaternion).
// product[u][w] = (sign, index) with q_u q_w = sign * q_index.
struct UnitTable {
  int size;
  std::array<std::array<std::pair<int, int>, 4>, 4> product;
  std::array<int, 4> conj_sign;
};

inline UnitTable unit_table(DivisionRing ring) {
  UnitTable t{};
  switch (ring) {
    case DivisionRing::Real:
      t.size = 1;
      t.product[0][0] = {1, 0};
      t.conj_sign = {1, 0, 0, 0};
      break;
    case DivisionRing::Complex:
      t.size = 2;
      t.product[0] = {{{1, 0}, {1, 1}}};
      t.product[1] = {{{1, 1}, {-1, 0}}};
      t.conj_sign = {1, -1, 0, 0};
      break;
    case DivisionRing::Quaternion:
      t.size = 4;
      t.product[0] = {{{1, 0}, {1, 1}, {1, 2}, {1, 3}}};
      t.product[1] = {{{1, 1}, {-1, 0}, {1, 3}, {-1, 2}}};
      t.product[2] = {{{1, 2}, {-1, 3}, {-1, 0}, {1, 1}}};
      t.product[3] = {{{1, 3}, {1, 2}, {-1, 1}, {-1, 0}}};
      t.conj_sign = {1, -1, -1, -1};
      break;
  }
  return t;
}

// Complex matrices representing the units: 1x1 for R and C, 2x2 for H.
template <typename Real>
Matrix<std::complex<Real>> unit_image(DivisionRing ring, int u) {
  using C = std::complex<Real>;
  if (ring == DivisionRing::Quaternion) {
    Matrix<C> q(2, 2);
    const C i(0, 1);
    switch (u) {
      case 0: q << 1, 0, 0, 1; break;
      case 1: q << i, 0, 0, -i; break;
      case 2: q << 0, 1, -1, 0; break;
      default: q << 0, i, i, 0; break;
    }
    return q;
  }
  Matrix<C> q(1, 1);
  q(0, 0) = u == 0 ? C(1) : C(0, 1);
  return q;
}

inline std::string ring_label(DivisionRing ring) {
  switch (ring) {
    case DivisionRing::Real: return "R";
    case DivisionRing::Complex: return "C";
    case DivisionRing::Quaternion: return "H";
  }
  return "?";
}

}  // namespace detail

/// Full matrix algebra M_n(D) over the scalar field, in the basis
/// e_rs * q_u (index (r*n + s)*|D| + u) with conjugate-transpose involution.
///
/// Over complex scalars the real and complex division rings both give
/// M_n(C); quaternions are only available over the reals.
template <typename Scalar>
Algebra<Scalar> make_matrix_algebra(Index n, DivisionRing ring = DivisionRing::Complex) {
  using A = Algebra<Scalar>;
  using Real = RealOf<Scalar>;
  if (n < 1) throw std::invalid_argument("matrix size must be positive");
  if constexpr (is_complex_v<Scalar>) {
    if (ring == DivisionRing::Quaternion)
      throw std::invalid_argument("quaternionic matrix algebras are only available over the reals");
    ring = DivisionRing::Complex;
  }
  const auto table = is_complex_v<Scalar> ? detail::unit_table(DivisionRing::Real) : detail::unit_table(ring);
  const Index d = table.size;
  const Index dim = n * n * d;
  auto index = [&](Index r, Index s, Index u) { return (r * n + s) * d + u; };

  std::vector<typename A::Term> terms;
  terms.reserve(static_cast<std::size_t>(n * n * n * d * d));
  for (Index r = 0; r < n; ++r)
    for (Index s = 0; s < n; ++s)
      for (Index v = 0; v < n; ++v)
        for (Index u = 0; u < d; ++u)
          for (Index w = 0; w < d; ++w) {
            const auto [sign, m] = table.product[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)];
            terms.push_back({index(r, s, u), index(s, v, w), index(r, v, m), Scalar(Real(sign))});
          }

  typename A::VectorType unit = A::VectorType::Zero(dim);
  for (Index r = 0; r < n; ++r) unit(index(r, r, 0)) = Scalar(1);

  typename A::MatrixType star = A::MatrixType::Zero(dim, dim);
  for (Index r = 0; r < n; ++r)
    for (Index s = 0; s < n; ++s)
      for (Index u = 0; u < d; ++u)
        star(index(s, r, u), index(r, s, u)) = Scalar(Real(table.conj_sign[static_cast<std::size_t>(u)]));

  const DivisionRing image_ring = is_complex_v<Scalar> ? DivisionRing::Real : ring;
  const Index q = image_ring == DivisionRing::Quaternion ? 2 : 1;
  typename A::NormBlock block;
  block.images.resize(static_cast<std::size_t>(dim));
  for (Index r = 0; r < n; ++r)
    for (Index s = 0; s < n; ++s)
      for (Index u = 0; u < d; ++u) {
        typename A::ComplexMatrix m = A::ComplexMatrix::Zero(n * q, n * q);
        m.block(r * q, s * q, q, q) = detail::unit_image<Real>(image_ring, static_cast<int>(u));
        block.images[static_cast<std::size_t>(index(r, s, u))] = std::move(m);
      }

  std::string label = "M" + std::to_string(n) + "(" +
                      (is_complex_v<Scalar> ? std::string("C") : detail::ring_label(ring)) + ")";
  return A(dim, std::move(terms), std::move(unit),
           typename A::Involution{std::move(star), is_complex_v<Scalar>},
           A::MatrixType::Identity(dim, dim), {std::move(block)}, std::move(label));
}

/// Block-diagonal product A x B with unit (1_A, 1_B).
template <typename Scalar>
Algebra<Scalar> direct_sum(const Algebra<Scalar>& a, const Algebra<Scalar>& b) {
  using A = Algebra<Scalar>;
  const Index da = a.dim();
  const Index db = b.dim();
  const Index dim = da + db;

  std::vector<typename A::Term> terms = a.terms();
  for (const auto& t : b.terms()) terms.push_back({t.i + da, t.j + da, t.k + da, t.value});

  typename A::VectorType unit(dim);
  unit << a.unit(), b.unit();

  std::optional<typename A::Involution> involution;
  if (a.involution() && b.involution()) {
    if (a.involution()->conjugate_linear != b.involution()->conjugate_linear)
      throw std::invalid_argument("direct_sum: involutions disagree on conjugate-linearity");
    typename A::MatrixType s = A::MatrixType::Zero(dim, dim);
    s.topLeftCorner(da, da) = a.involution()->matrix;
    s.bottomRightCorner(db, db) = b.involution()->matrix;
    involution = typename A::Involution{std::move(s), a.involution()->conjugate_linear};
  }

  typename A::MatrixType gram = A::MatrixType::Zero(dim, dim);
  gram.topLeftCorner(da, da) = a.inner_product();
  gram.bottomRightCorner(db, db) = b.inner_product();

  std::vector<typename A::NormBlock> blocks;
  auto append = [&](const A& part, Index offset) {
    for (const auto& src : part.norm_blocks()) {
      const Index n = src.images.front().rows();
      typename A::NormBlock block;
      block.images.assign(static_cast<std::size_t>(dim), A::ComplexMatrix::Zero(n, n));
      for (Index i = 0; i < part.dim(); ++i)
        block.images[static_cast<std::size_t>(i + offset)] = src.images[static_cast<std::size_t>(i)];
      blocks.push_back(std::move(block));
    }
  };
  append(a, 0);
  append(b, da);

  return A(dim, std::move(terms), std::move(unit), std::move(involution), std::move(gram),
           std::move(blocks), a.label() + "+" + b.label());
}

/// The scalar field itself as a one-dimensional algebra.
template <typename Scalar>
Algebra<Scalar> make_scalar_algebra() {
  return make_matrix_algebra<Scalar>(1, is_complex_v<Scalar> ? DivisionRing::Complex : DivisionRing::Real);
}

/// Dual numbers k[x]/(x^2), basis (1, x). Not semisimple.
template <typename Scalar>
Algebra<Scalar> make_dual_numbers() {
  using A = Algebra<Scalar>;
  std::vector<typename A::Term> terms = {{0, 0, 0, Scalar(1)}, {0, 1, 1, Scalar(1)}, {1, 0, 1, Scalar(1)}};
  typename A::VectorType unit = A::VectorType::Unit(2, 0);
  return A::from_terms(2, std::move(terms), std::move(unit), std::nullopt, std::nullopt, "D");
}

template <typename Scalar, typename DerivedA, typename DerivedB>
Vector<Scalar> multiply(const Algebra<Scalar>& algebra, const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b) {
  return algebra.multiply(a, b);
}

template <typename Scalar, typename Derived>
RealOf<Scalar> element_norm(const Algebra<Scalar>& algebra, const Eigen::MatrixBase<Derived>& a) {
  return algebra.element_norm(a);
}

/// Row-major flattening of an n x n matrix into M_n coordinates (real or
/// complex division ring matching the scalar).
template <typename Derived>
Vector<typename Derived::Scalar> flatten_matrix(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  Vector<S> v(m.rows() * m.cols());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) v(r * m.cols() + c) = m(r, c);
  return v;
}

template <typename Derived>
Matrix<typename Derived::Scalar> unflatten_matrix(const Eigen::MatrixBase<Derived>& v, Index n) {
  using S = typename Derived::Scalar;
  if (v.size() != n * n) throw std::invalid_argument("unflatten_matrix: length is not n^2");
  Matrix<S> m(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = v(r * n + c);
  return m;
}

/// Coefficient matrix of a -> g a g^{-1} on M_n in the matrix-unit basis.
template <typename Derived>
Matrix<typename Derived::Scalar> conjugation_matrix(const Eigen::MatrixBase<Derived>& g) {
  using S = typename Derived::Scalar;
  const Index n = g.rows();
  const Matrix<S> g_inv = g.inverse();
  Matrix<S> out(n * n, n * n);
  for (Index r = 0; r < n; ++r)
    for (Index s = 0; s < n; ++s) {
      Matrix<S> unit = Matrix<S>::Zero(n, n);
      unit(r, s) = S(1);
      out.col(r * n + s) = flatten_matrix(g * unit * g_inv);
    }
  return out;
}

}  // namespace prolong

#endif  // PROLONG_ALGEBRA_HPP
