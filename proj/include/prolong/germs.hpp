#ifndef PROLONG_GERMS_HPP
#define PROLONG_GERMS_HPP

#include "prolong/algebra.hpp"
#include "prolong/base_complex.hpp"
#include "prolong/equivariance.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace prolong {

/// Block sizes of a product of matrix algebras M_{n_1} x ... x M_{n_k}
/// over the scalar field, in the order they were summed.
using BlockSizes = std::vector<Index>;

template <typename Scalar>
Algebra<Scalar> make_block_algebra(const BlockSizes& blocks) {
  if (blocks.empty()) throw std::invalid_argument("block algebra: no blocks");
  const auto ring = is_complex_v<Scalar> ? DivisionRing::Complex : DivisionRing::Real;
  Algebra<Scalar> out = make_matrix_algebra<Scalar>(blocks.front(), ring);
  for (std::size_t i = 1; i < blocks.size(); ++i) out = direct_sum(out, make_matrix_algebra<Scalar>(blocks[i], ring));
  return out;
}

/// Unital embedding of the block algebra into M_N: each block repeated
/// N / sum(n_i) times consecutively along the diagonal.
template <typename Scalar>
Matrix<Scalar> standard_embedding(const BlockSizes& blocks, Index N) {
  const Index total = std::accumulate(blocks.begin(), blocks.end(), Index(0));
  if (total < 1 || N % total != 0)
    throw std::invalid_argument("standard embedding: block sizes must divide the ambient size");
  const Index mult = N / total;
  Index dim = 0;
  for (Index b : blocks) dim += b * b;
  Matrix<Scalar> out = Matrix<Scalar>::Zero(N * N, dim);
  Index column = 0;
  Index offset = 0;
  for (Index b : blocks) {
    for (Index r = 0; r < b; ++r)
      for (Index s = 0; s < b; ++s, ++column)
        for (Index m = 0; m < mult; ++m) {
          const Index row = offset + m * b + r;
          const Index col = offset + m * b + s;
          out(row * N + col, column) = Scalar(1);
        }
    offset += mult * b;
  }
  return out;
}

/// Rotation by `angle` in each coordinate plane (i, i + N/2); N even.
template <typename Scalar>
Matrix<Scalar> plane_rotation(Index N, double angle) {
  if (N % 2 != 0) throw std::invalid_argument("plane_rotation: ambient size must be even");
  Matrix<Scalar> r = Matrix<Scalar>::Identity(N, N);
  const Index h = N / 2;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (Index i = 0; i < h; ++i) {
    r(i, i) = Scalar(c);
    r(i, i + h) = Scalar(-s);
    r(i + h, i) = Scalar(s);
    r(i + h, i + h) = Scalar(c);
  }
  return r;
}

/// Rotation by a multiple of pi/2 with exact 0/+-1 entries.
template <typename Scalar>
Matrix<Scalar> quarter_plane_rotation(Index N, int quarters) {
  Matrix<Scalar> r = plane_rotation<Scalar>(N, 0.0);
  Matrix<Scalar> step = Matrix<Scalar>::Zero(N, N);
  const Index h = N / 2;
  for (Index i = 0; i < h; ++i) {
    step(i, i + h) = Scalar(-1);
    step(i + h, i) = Scalar(1);
  }
  for (int q = 0; q < ((quarters % 4) + 4) % 4; ++q) r = step * r;
  return r;
}

/// Coefficient matrix of Ad(g) o iota for an embedding iota into M_N.
template <typename Scalar>
Matrix<Scalar> conjugated_embedding(const Matrix<Scalar>& g, const Matrix<Scalar>& iota) {
  return conjugation_matrix(g) * iota;
}

/// Polar angle of a base vertex.
inline double vertex_angle(const BaseComplex& base, int x) {
  const auto& p = base.coordinates(x);
  return std::atan2(p[1], p[0]);
}

/// Rotated-projection family: Ad(R(frequency * theta)) o iota on Z.
template <typename Scalar>
MapFamily<Scalar> rotated_embedding_germ(const BaseComplex& base, const BlockSizes& blocks, Index N, double frequency) {
  const Matrix<Scalar> iota = standard_embedding<Scalar>(blocks, N);
  MapFamily<Scalar> germ;
  for (int z : base.z_vertices())
    germ.emplace(z, conjugated_embedding(plane_rotation<Scalar>(N, frequency * vertex_angle(base, z)), iota));
  return germ;
}

/// iota on Z vertices with x < split, Ad(quarter rotation) o iota elsewhere.
template <typename Scalar>
MapFamily<Scalar> split_embedding_germ(const BaseComplex& base, const BlockSizes& blocks, Index N, double split) {
  const Matrix<Scalar> iota = standard_embedding<Scalar>(blocks, N);
  const Matrix<Scalar> turned = conjugated_embedding(quarter_plane_rotation<Scalar>(N, 1), iota);
  MapFamily<Scalar> germ;
  for (int z : base.z_vertices()) germ.emplace(z, base.coordinates(z)[0] < split ? iota : turned);
  return germ;
}

template <typename Scalar>
MapFamily<Scalar> constant_germ(const BaseComplex& base, const Matrix<Scalar>& value) {
  MapFamily<Scalar> germ;
  for (int z : base.z_vertices()) germ.emplace(z, value);
  return germ;
}

/// Cayley transform (I - S)^{-1} (I + S); unitary for skew-adjoint S.
template <typename Scalar>
Matrix<Scalar> cayley(const Matrix<Scalar>& skew) {
  const Index n = skew.rows();
  const Matrix<Scalar> id = Matrix<Scalar>::Identity(n, n);
  return (id - skew).partialPivLu().solve(id + skew);
}

/// Perturbed-identity family: Ad(cayley(amplitude * (x A + y B))) o iota
/// with fixed skew-adjoint directions A, B.
template <typename Scalar>
MapFamily<Scalar> perturbed_identity_germ(const BaseComplex& base, const BlockSizes& blocks, Index N, double amplitude,
                                          const Matrix<Scalar>& dir_a, const Matrix<Scalar>& dir_b) {
  const Matrix<Scalar> iota = standard_embedding<Scalar>(blocks, N);
  MapFamily<Scalar> germ;
  for (int z : base.z_vertices()) {
    const auto& p = base.coordinates(z);
    const Matrix<Scalar> skew = Scalar(amplitude) * (Scalar(p[0]) * dir_a + Scalar(p[1]) * dir_b);
    germ.emplace(z, conjugated_embedding(cayley(skew), iota));
  }
  return germ;
}

/// Unit tangent (-sin theta, cos theta) of the circle through each Z vertex.
template <typename Scalar>
MapFamily<Scalar> tangent_line_germ(const BaseComplex& base) {
  MapFamily<Scalar> germ;
  for (int z : base.z_vertices()) {
    const double theta = vertex_angle(base, z);
    Matrix<Scalar> f(2, 1);
    f << Scalar(-std::sin(theta)), Scalar(std::cos(theta));
    germ.emplace(z, f);
  }
  return germ;
}

}  // namespace prolong

#endif  // PROLONG_GERMS_HPP
