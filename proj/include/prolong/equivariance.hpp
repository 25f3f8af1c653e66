#ifndef PROLONG_EQUIVARIANCE_HPP
#define PROLONG_EQUIVARIANCE_HPP

#include "prolong/algebra.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace prolong {

/// vertex -> coefficient matrix (fiber map or frame).
template <typename Scalar>
using MapFamily = std::map<int, Matrix<Scalar>>;

/// A finite group acting on base vertices by permutations and on the
/// source/target fibers by linear maps.
///
/// Group elements are indices 0..order-1 with an explicit multiplication
/// table; table[g][h] is the index of g*h.
template <typename Scalar>
class GroupAction {
 public:
  using Table = std::vector<std::vector<int>>;
  using Permutation = std::vector<int>;

  static constexpr double kHomomorphismTolerance = 1e-12;

  GroupAction(Table table, std::vector<Permutation> base_perm, std::vector<Matrix<Scalar>> source,
              std::vector<Matrix<Scalar>> target)
      : table_(std::move(table)),
        base_perm_(std::move(base_perm)),
        source_(std::move(source)),
        target_(std::move(target)) {
    check_group();
    check_actions();
  }

  int order() const { return static_cast<int>(table_.size()); }
  int identity() const { return identity_; }
  int inverse(int g) const { return inverse_[static_cast<std::size_t>(g)]; }
  int compose(int g, int h) const { return table_[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)]; }
  int act(int g, int vertex) const {
    return base_perm_[static_cast<std::size_t>(g)][static_cast<std::size_t>(vertex)];
  }
  int num_vertices() const { return static_cast<int>(base_perm_.front().size()); }

  const Table& table() const { return table_; }
  const std::vector<Permutation>& base_permutations() const { return base_perm_; }
  const Matrix<Scalar>& source_action(int g) const { return source_[static_cast<std::size_t>(g)]; }
  const Matrix<Scalar>& target_action(int g) const { return target_[static_cast<std::size_t>(g)]; }
  Index source_dim() const { return source_.front().rows(); }
  Index target_dim() const { return target_.front().rows(); }

  /// True when every element maps the marked vertex set onto itself.
  bool preserves(const std::vector<bool>& subset) const {
    for (const auto& perm : base_perm_)
      for (std::size_t v = 0; v < perm.size(); ++v)
        if (subset[v] != subset[static_cast<std::size_t>(perm[v])]) return false;
    return true;
  }

 private:
  void check_group() {
    const int n = static_cast<int>(table_.size());
    if (n < 1) throw std::invalid_argument("group: empty multiplication table");
    for (const auto& row : table_) {
      if (static_cast<int>(row.size()) != n) throw std::invalid_argument("group: table is not square");
      for (int x : row)
        if (x < 0 || x >= n) throw std::invalid_argument("group: table entry out of range");
    }
    identity_ = -1;
    for (int e = 0; e < n && identity_ < 0; ++e) {
      bool ok = true;
      for (int g = 0; g < n && ok; ++g) ok = compose(e, g) == g && compose(g, e) == g;
      if (ok) identity_ = e;
    }
    if (identity_ < 0) throw std::invalid_argument("group: no identity element");
    inverse_.assign(static_cast<std::size_t>(n), -1);
    for (int g = 0; g < n; ++g)
      for (int h = 0; h < n; ++h)
        if (compose(g, h) == identity_ && compose(h, g) == identity_) inverse_[static_cast<std::size_t>(g)] = h;
    for (int g = 0; g < n; ++g)
      if (inverse_[static_cast<std::size_t>(g)] < 0) throw std::invalid_argument("group: element without inverse");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (compose(compose(a, b), c) != compose(a, compose(b, c)))
            throw std::invalid_argument("group: multiplication table is not associative");
  }

  void check_actions() const {
    const std::size_t n = table_.size();
    if (base_perm_.size() != n || source_.size() != n || target_.size() != n)
      throw std::invalid_argument("group action: need one permutation and two fiber matrices per element");
    const std::size_t nv = base_perm_.front().size();
    for (const auto& perm : base_perm_) {
      if (perm.size() != nv) throw std::invalid_argument("group action: permutations differ in length");
      std::vector<bool> seen(nv, false);
      for (int v : perm) {
        if (v < 0 || static_cast<std::size_t>(v) >= nv || seen[static_cast<std::size_t>(v)])
          throw std::invalid_argument("group action: base action is not a permutation");
        seen[static_cast<std::size_t>(v)] = true;
      }
    }
    auto check_square = [](const std::vector<Matrix<Scalar>>& ms, const char* what) {
      for (const auto& m : ms)
        if (m.rows() != m.cols() || m.rows() != ms.front().rows())
          throw std::invalid_argument(std::string("group action: inconsistent ") + what + " matrices");
    };
    check_square(source_, "source");
    check_square(target_, "target");
    for (int g = 0; g < order(); ++g)
      for (int h = 0; h < order(); ++h) {
        const int gh = compose(g, h);
        for (std::size_t v = 0; v < nv; ++v)
          if (act(gh, static_cast<int>(v)) != act(g, act(h, static_cast<int>(v))))
            throw std::invalid_argument("group action: base action is not a homomorphism");
        auto defect = [&](const std::vector<Matrix<Scalar>>& ms) {
          const auto& x = ms[static_cast<std::size_t>(gh)];
          return (x - ms[static_cast<std::size_t>(g)] * ms[static_cast<std::size_t>(h)]).cwiseAbs().maxCoeff() /
                 std::max(RealOf<Scalar>(1), x.cwiseAbs().maxCoeff());
        };
        if (defect(source_) > kHomomorphismTolerance || defect(target_) > kHomomorphismTolerance)
          throw std::invalid_argument("group action: fiber action is not a homomorphism");
      }
  }

  Table table_;
  std::vector<Permutation> base_perm_;
  std::vector<Matrix<Scalar>> source_;
  std::vector<Matrix<Scalar>> target_;
  int identity_ = 0;
  std::vector<int> inverse_;
};

/// Max over basis pairs of the multiplicativity and unit defects of a
/// linear self-map of an algebra.
template <typename Scalar>
RealOf<Scalar> automorphism_defect(const Algebra<Scalar>& algebra, const Matrix<Scalar>& alpha) {
  RealOf<Scalar> worst = (alpha * algebra.unit() - algebra.unit()).cwiseAbs().maxCoeff();
  for (Index i = 0; i < algebra.dim(); ++i)
    for (Index j = 0; j < algebra.dim(); ++j) {
      const auto bi = algebra.basis_vector(i);
      const auto bj = algebra.basis_vector(j);
      const Vector<Scalar> d = alpha * algebra.multiply(bi, bj) - algebra.multiply(alpha * bi, alpha * bj);
      worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
  return worst;
}

/// Throws unless every fiber matrix is an algebra automorphism to 1e-12.
template <typename Scalar>
void validate_automorphisms(const GroupAction<Scalar>& action, const Algebra<Scalar>& source,
                            const Algebra<Scalar>& target, double tol = 1e-12) {
  if (action.source_dim() != source.dim() || action.target_dim() != target.dim())
    throw std::invalid_argument("group action: fiber dimensions do not match the algebras");
  for (int g = 0; g < action.order(); ++g) {
    if (automorphism_defect(source, action.source_action(g)) > tol)
      throw std::invalid_argument("group action: source fiber action is not an automorphism");
    if (automorphism_defect(target, action.target_action(g)) > tol)
      throw std::invalid_argument("group action: target fiber action is not an automorphism");
  }
}

/// Z/n generated by one vertex permutation and two fiber matrices.
template <typename Scalar>
GroupAction<Scalar> make_cyclic_action(int n, const std::vector<int>& base_perm, const Matrix<Scalar>& source_gen,
                                       const Matrix<Scalar>& target_gen) {
  if (n < 1) throw std::invalid_argument("cyclic action: order must be positive");
  typename GroupAction<Scalar>::Table table(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % n;

  std::vector<std::vector<int>> perms;
  std::vector<Matrix<Scalar>> src;
  std::vector<Matrix<Scalar>> tgt;
  std::vector<int> p(base_perm.size());
  for (std::size_t v = 0; v < p.size(); ++v) p[v] = static_cast<int>(v);
  Matrix<Scalar> s = Matrix<Scalar>::Identity(source_gen.rows(), source_gen.cols());
  Matrix<Scalar> t = Matrix<Scalar>::Identity(target_gen.rows(), target_gen.cols());
  for (int k = 0; k < n; ++k) {
    perms.push_back(p);
    src.push_back(s);
    tgt.push_back(t);
    std::vector<int> next(p.size());
    for (std::size_t v = 0; v < p.size(); ++v) next[v] = base_perm[static_cast<std::size_t>(p[v])];
    p = std::move(next);
    s = source_gen * s;
    t = target_gen * t;
  }
  for (std::size_t v = 0; v < p.size(); ++v)
    if (p[v] != static_cast<int>(v)) throw std::invalid_argument("cyclic action: base permutation order does not divide n");
  if (!s.isIdentity(1e-10)) throw std::invalid_argument("cyclic action: source generator order does not divide n");
  if (!t.isIdentity(1e-10)) throw std::invalid_argument("cyclic action: target generator order does not divide n");
  return GroupAction<Scalar>(std::move(table), std::move(perms), std::move(src), std::move(tgt));
}

/// x -> (1/|U|) sum_u beta_u^{-1} family(u.x) alpha_u.
template <typename Scalar>
MapFamily<Scalar> average_map_family(const GroupAction<Scalar>& action, const MapFamily<Scalar>& family) {
  MapFamily<Scalar> out;
  const auto weight = Scalar(RealOf<Scalar>(1) / RealOf<Scalar>(action.order()));
  for (const auto& [x, value] : family) {
    Matrix<Scalar> acc = Matrix<Scalar>::Zero(value.rows(), value.cols());
    for (int u = 0; u < action.order(); ++u) {
      const auto it = family.find(action.act(u, x));
      if (it == family.end())
        throw std::invalid_argument("average_map_family: family is missing vertex " + std::to_string(action.act(u, x)) +
                                    " of the orbit of " + std::to_string(x));
      acc.noalias() += action.target_action(action.inverse(u)) * it->second * action.source_action(u);
    }
    out.emplace(x, weight * acc);
  }
  return out;
}

template <typename Scalar>
RealOf<Scalar> vertex_equivariance_defect(const GroupAction<Scalar>& action, const MapFamily<Scalar>& family, int x) {
  const auto& value = family.at(x);
  RealOf<Scalar> worst = 0;
  for (int u = 0; u < action.order(); ++u) {
    const auto it = family.find(action.act(u, x));
    if (it == family.end())
      throw std::invalid_argument("equivariance_defect: family is not defined on the orbit of " + std::to_string(x));
    const Matrix<Scalar> moved = action.target_action(u) * value * action.source_action(action.inverse(u));
    worst = std::max(worst, spectral_norm(Matrix<Scalar>(moved - it->second)));
  }
  return worst;
}

/// Max over (u, x) of ||beta_u family(x) alpha_u^{-1} - family(u.x)||.
template <typename Scalar>
RealOf<Scalar> equivariance_defect(const GroupAction<Scalar>& action, const MapFamily<Scalar>& family) {
  RealOf<Scalar> worst = 0;
  for (const auto& [x, value] : family) worst = std::max(worst, vertex_equivariance_defect(action, family, x));
  return worst;
}

/// Trapezoid average over `samples` equally spaced angles in [0, 2 pi).
template <typename Scalar>
Matrix<Scalar> haar_average_circle(int samples, const std::function<Matrix<Scalar>(double)>& family) {
  if (samples < 1) throw std::invalid_argument("haar_average_circle: need at least one sample");
  Matrix<Scalar> acc = family(0.0);
  for (int s = 1; s < samples; ++s) acc += family(2.0 * std::numbers::pi * s / samples);
  return acc / Scalar(RealOf<Scalar>(samples));
}

}  // namespace prolong

#endif  // PROLONG_EQUIVARIANCE_HPP
