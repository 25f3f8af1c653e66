#ifndef PROLONG_BUNDLE_HPP
#define PROLONG_BUNDLE_HPP

#include "prolong/base_complex.hpp"
#include "prolong/equivariance.hpp"
#include "prolong/rectifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace prolong {

/// Runs fn(i) for i in [0, count), split over `threads` workers. Workers
/// write to disjoint slots only.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Isometric factor U V^H of the thin SVD, the closest isometry in
/// Frobenius distance. Throws std::domain_error on rank-deficient input.
template <typename Derived>
Matrix<typename Derived::Scalar> polar_isometry(const Eigen::MatrixBase<Derived>& frame, double rank_tol = 1e-10) {
  using S = typename Derived::Scalar;
  if (frame.rows() < frame.cols()) throw std::domain_error("polar_isometry: frame has more columns than rows");
  Eigen::JacobiSVD<Matrix<S>> svd(frame, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0) || s(s.size() - 1) <= rank_tol * s(0))
    throw std::domain_error("polar_isometry: frame is rank deficient");
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// max |F^H F - I| entrywise.
template <typename Derived>
RealOf<typename Derived::Scalar> isometry_defect(const Eigen::MatrixBase<Derived>& frame) {
  using S = typename Derived::Scalar;
  return (frame.adjoint() * frame - Matrix<S>::Identity(frame.cols(), frame.cols())).cwiseAbs().maxCoeff();
}

struct ExtensionOptions {
  double shepard_power = 2.0;
  int shepard_k = 4;
  double rectify_tol = kDefaultRectifyTol;
  int max_iter = kDefaultRectifyMaxIter;
  double equivariance_tol = 1e-10;
  /// Smallest singular value a W vertex must keep (frames or embeddings).
  double min_injectivity_margin = 1e-2;
  double K2_max = 10.0;
  double K0_max = 10.0;
  /// Tolerance for the germ invariants on Z.
  double germ_tol = 1e-10;
  /// Average a non-equivariant germ on Z instead of rejecting it.
  bool preaverage_germ = false;
  int threads = 1;
};

struct VertexDiagnostics {
  int vertex = 0;
  double distance_to_z = 0;
  bool in_z = false;
  bool passed = false;
  bool in_w = false;
  /// Algebra mode: multiplicativity defect. Frame mode: isometry defect.
  double defect = std::numeric_limits<double>::quiet_NaN();
  double unit_defect = std::numeric_limits<double>::quiet_NaN();
  double equivariance_defect = std::numeric_limits<double>::quiet_NaN();
  double injectivity_margin = 0;
  int iterations = 0;
  std::string status;
};

struct EdgeContinuity {
  int a;
  int b;
  double modulus;
};

template <typename Scalar>
struct ExtensionResult {
  std::vector<int> W;
  double radius = 0;
  MapFamily<Scalar> maps_on_w;
  std::vector<VertexDiagnostics> diagnostics;
  UniformBounds bounds;
  std::vector<EdgeContinuity> continuity;
  /// W = Z although Z is a proper subset.
  bool degenerate = false;

  double max_defect = 0;
  double max_equivariance_defect = 0;
  double min_injectivity_margin = std::numeric_limits<double>::infinity();
  double max_continuity_modulus = 0;
  int max_iterations = 0;
};

template <typename Scalar>
struct FrameGerm {
  Index rank = 0;
  Index ambient_dim = 0;
  MapFamily<Scalar> frames_on_z;
};

template <typename Scalar>
struct AlgebraGerm {
  std::shared_ptr<const Algebra<Scalar>> model;
  std::shared_ptr<const Algebra<Scalar>> ambient;
  MapFamily<Scalar> maps_on_z;
  bool star_mode = false;
};

/// Bounds of one fiber map in the pulled-back norm.
template <typename Scalar>
UniformBounds vertex_uniform_bounds(const Algebra<Scalar>& model, const Algebra<Scalar>& ambient,
                                    const Matrix<Scalar>& map) {
  UniformBounds b;
  const Matrix<Scalar> images = map * model.orthonormalizer_inverse();
  std::vector<double> norms(static_cast<std::size_t>(images.cols()));
  for (Index p = 0; p < images.cols(); ++p) norms[static_cast<std::size_t>(p)] = ambient.element_norm(images.col(p));
  for (Index p = 0; p < images.cols(); ++p)
    for (Index q = 0; q < images.cols(); ++q) {
      const double denom = norms[static_cast<std::size_t>(p)] * norms[static_cast<std::size_t>(q)];
      if (!(denom > 0)) continue;
      b.K2 = std::max(b.K2, double(ambient.element_norm(ambient.multiply(images.col(p), images.col(q)))) / denom);
    }
  const double unit_norm = ambient.element_norm(map * model.unit());
  b.K0 = unit_norm > 0 ? std::max({1.0, unit_norm, 1.0 / unit_norm}) : std::numeric_limits<double>::infinity();
  return b;
}

/// K2 and K0 over the given maps.
template <typename Scalar>
UniformBounds measure_uniform_bounds(const Algebra<Scalar>& model, const Algebra<Scalar>& ambient,
                                     const MapFamily<Scalar>& maps_on_w) {
  UniformBounds total;
  for (const auto& [x, m] : maps_on_w) {
    const auto b = vertex_uniform_bounds(model, ambient, m);
    total.K2 = std::max(total.K2, b.K2);
    total.K0 = std::max(total.K0, b.K0);
  }
  return total;
}

/// Per edge inside the family's domain: max over an orthonormal basis u of
/// | ||phi_x(u)|| - ||phi_y(u)|| | / length.
template <typename Scalar, typename ImageNorm>
std::vector<EdgeContinuity> continuity_report(const BaseComplex& base, const MapFamily<Scalar>& family,
                                              const Matrix<Scalar>& source_basis, ImageNorm&& image_norm) {
  std::vector<EdgeContinuity> out;
  for (const auto& e : base.edges()) {
    const auto ia = family.find(e.a);
    const auto ib = family.find(e.b);
    if (ia == family.end() || ib == family.end()) continue;
    double worst = 0;
    for (Index p = 0; p < source_basis.cols(); ++p) {
      const double na = image_norm(Vector<Scalar>(ia->second * source_basis.col(p)));
      const double nb = image_norm(Vector<Scalar>(ib->second * source_basis.col(p)));
      worst = std::max(worst, std::abs(na - nb));
    }
    out.push_back({e.a, e.b, worst / e.length});
  }
  return out;
}

template <typename Scalar>
std::vector<EdgeContinuity> norm_continuity_report(const BaseComplex& base, const Algebra<Scalar>& model,
                                                   const Algebra<Scalar>& ambient, const MapFamily<Scalar>& maps_on_w) {
  return continuity_report(base, maps_on_w, model.orthonormalizer_inverse(),
                           [&](const Vector<Scalar>& v) { return double(ambient.element_norm(v)); });
}

template <typename Scalar>
std::vector<EdgeContinuity> frame_continuity_report(const BaseComplex& base, Index rank,
                                                    const MapFamily<Scalar>& frames_on_w) {
  return continuity_report(base, frames_on_w, Matrix<Scalar>(Matrix<Scalar>::Identity(rank, rank)),
                           [](const Vector<Scalar>& v) { return double(v.norm()); });
}

/// Largest coefficient difference between the result on Z and the germ.
template <typename Scalar>
double restriction_defect(const BaseComplex& base, const MapFamily<Scalar>& germ, const MapFamily<Scalar>& maps_on_w) {
  double worst = 0;
  for (int z : base.z_vertices()) {
    const auto it = maps_on_w.find(z);
    if (it == maps_on_w.end()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, double((it->second - germ.at(z)).cwiseAbs().maxCoeff()));
  }
  return worst;
}

namespace detail {

template <typename Scalar>
void check_action_on_base(const BaseComplex& base, const GroupAction<Scalar>& action) {
  if (action.num_vertices() != base.num_vertices())
    throw std::invalid_argument("group action and base complex disagree on the vertex count");
  if (!action.preserves(base.z_mask())) throw std::invalid_argument("group action does not preserve Z");
  for (const auto& perm : action.base_permutations())
    if (!base.is_automorphism(perm, 1e-9))
      throw std::invalid_argument("group action does not act by isometries of the base metric");
}

template <typename Scalar>
void check_germ_domain(const BaseComplex& base, const MapFamily<Scalar>& germ, Index rows, Index cols) {
  if (germ.size() != base.z_vertices().size()) throw std::invalid_argument("germ must be given exactly on Z");
  for (int z : base.z_vertices()) {
    const auto it = germ.find(z);
    if (it == germ.end()) throw std::invalid_argument("germ is missing Z vertex " + std::to_string(z));
    if (it->second.rows() != rows || it->second.cols() != cols)
      throw std::invalid_argument("germ matrix at vertex " + std::to_string(z) + " has the wrong shape");
  }
}

// Returns the germ to use on Z: unchanged when equivariant, averaged when
// allowed, otherwise rejected.
template <typename Scalar>
MapFamily<Scalar> equivariant_germ(const GroupAction<Scalar>& action, const MapFamily<Scalar>& germ,
                                   const ExtensionOptions& opts) {
  if (equivariance_defect(action, germ) <= opts.equivariance_tol) return germ;
  if (!opts.preaverage_germ) throw std::invalid_argument("germ is not equivariant on Z");
  return average_map_family(action, germ);
}

template <typename Scalar>
void finalize_summary(const BaseComplex& base, ExtensionResult<Scalar>& result) {
  result.degenerate = result.W.size() == base.z_vertices().size() &&
                      static_cast<int>(base.z_vertices().size()) < base.num_vertices();
  for (const auto& d : result.diagnostics) {
    if (!d.in_w) continue;
    result.max_defect = std::max(result.max_defect, d.defect);
    result.max_equivariance_defect = std::max(result.max_equivariance_defect, d.equivariance_defect);
    result.min_injectivity_margin = std::min(result.min_injectivity_margin, d.injectivity_margin);
    result.max_iterations = std::max(result.max_iterations, d.iterations);
  }
  for (const auto& c : result.continuity) result.max_continuity_modulus = std::max(result.max_continuity_modulus, c.modulus);
}

}  // namespace detail

/// Input checks of extend_frame_bundle; returns the germ used on Z.
/// Throws std::invalid_argument.
template <typename Scalar>
MapFamily<Scalar> check_frame_inputs(const BaseComplex& base, const FrameGerm<Scalar>& germ,
                                     const GroupAction<Scalar>& action, const ExtensionOptions& opts = {}) {
  if (germ.rank < 1 || germ.ambient_dim < germ.rank) throw std::invalid_argument("frame germ: need 1 <= rank <= ambient dim");
  detail::check_germ_domain(base, germ.frames_on_z, germ.ambient_dim, germ.rank);
  for (const auto& [z, f] : germ.frames_on_z)
    if (isometry_defect(f) > opts.germ_tol)
      throw std::invalid_argument("frame germ is not isometric at vertex " + std::to_string(z));
  detail::check_action_on_base(base, action);
  if (action.source_dim() != germ.rank || action.target_dim() != germ.ambient_dim)
    throw std::invalid_argument("group action fiber dimensions do not match the frame germ");
  return detail::equivariant_germ(action, germ.frames_on_z, opts);
}

/// Input checks of extend_algebra_subbundle; returns the germ used on Z.
/// Throws std::domain_error for a non-semisimple model and
/// std::invalid_argument otherwise.
template <typename Scalar>
MapFamily<Scalar> check_algebra_inputs(const BaseComplex& base, const AlgebraGerm<Scalar>& germ,
                                       const GroupAction<Scalar>& action, const ExtensionOptions& opts = {}) {
  if (!germ.model || !germ.ambient) throw std::invalid_argument("algebra germ: missing model or ambient algebra");
  const auto& model = *germ.model;
  const auto& ambient = *germ.ambient;
  if (!semisimplicity_check(model).semisimple)
    throw std::domain_error("model fiber '" + model.label() + "' is not semisimple");
  if (germ.star_mode && (!model.has_involution() || !ambient.has_involution()))
    throw std::invalid_argument("star mode needs involutions on the model and ambient algebras");

  detail::check_germ_domain(base, germ.maps_on_z, ambient.dim(), model.dim());
  for (const auto& [z, m] : germ.maps_on_z) {
    const FiberMap<Scalar> phi(germ.model, germ.ambient, m);
    if (multiplicativity_defect(phi) > opts.germ_tol)
      throw std::invalid_argument("algebra germ is not multiplicative at vertex " + std::to_string(z));
    if (ambient.element_norm(m * model.unit() - ambient.unit()) > opts.germ_tol)
      throw std::invalid_argument("algebra germ is not unital at vertex " + std::to_string(z));
    if (!(injectivity_margin(phi) > 0))
      throw std::invalid_argument("algebra germ is not injective at vertex " + std::to_string(z));
    if (germ.star_mode && map_distance(star_of_map(phi), phi) > opts.germ_tol)
      throw std::invalid_argument("algebra germ is not a *-map at vertex " + std::to_string(z));
  }
  detail::check_action_on_base(base, action);
  validate_automorphisms(action, model, ambient);
  return detail::equivariant_germ(action, germ.maps_on_z, opts);
}

/// Extends an isometric rank-n frame germ on Z to an equivariant isometric
/// frame family on a neighborhood W: Shepard extension, group averaging,
/// rank check and radius search, then polar decomposition on W.
template <typename Scalar>
ExtensionResult<Scalar> extend_frame_bundle(const BaseComplex& base, const FrameGerm<Scalar>& germ,
                                            const GroupAction<Scalar>& action, const ExtensionOptions& opts = {}) {
  const MapFamily<Scalar> on_z = check_frame_inputs(base, germ, action, opts);

  const auto extended = shepard_extend(base, on_z, opts.shepard_power, opts.shepard_k);
  MapFamily<Scalar> outside;
  for (const auto& [x, f] : extended)
    if (!base.in_z(x)) outside.emplace(x, f);
  const MapFamily<Scalar> averaged = average_map_family(action, outside);

  const auto n = static_cast<std::size_t>(base.num_vertices());
  ExtensionResult<Scalar> result;
  result.diagnostics.resize(n);
  std::vector<bool> ok(n, false);
  for (int x = 0; x < base.num_vertices(); ++x) {
    auto& d = result.diagnostics[static_cast<std::size_t>(x)];
    d.vertex = x;
    d.distance_to_z = base.distance_to_z(x);
    d.in_z = base.in_z(x);
    const Matrix<Scalar>& f = d.in_z ? on_z.at(x) : averaged.at(x);
    d.injectivity_margin = smallest_singular_value(f);
    d.passed = d.in_z || d.injectivity_margin > opts.min_injectivity_margin;
    d.status = d.in_z ? "germ" : (d.passed ? "ok" : "rank_deficient");
    ok[static_cast<std::size_t>(x)] = d.passed;
  }

  const auto radius = extension_radius(base, ok);
  result.radius = radius.radius;
  result.W = radius.W;
  std::vector<Matrix<Scalar>> polar(result.W.size());
  parallel_for(result.W.size(), opts.threads, [&](std::size_t i) {
    const int x = result.W[i];
    polar[i] = base.in_z(x) ? on_z.at(x) : polar_isometry(averaged.at(x));
  });
  for (std::size_t i = 0; i < result.W.size(); ++i) result.maps_on_w.emplace(result.W[i], std::move(polar[i]));

  for (int x : result.W) {
    auto& d = result.diagnostics[static_cast<std::size_t>(x)];
    const auto& f = result.maps_on_w.at(x);
    d.in_w = true;
    d.defect = isometry_defect(f);
    d.equivariance_defect = vertex_equivariance_defect(action, result.maps_on_w, x);
    d.injectivity_margin = smallest_singular_value(f);
  }
  result.continuity = frame_continuity_report(base, germ.rank, result.maps_on_w);
  detail::finalize_summary(base, result);
  return result;
}

/// Extends a unital multiplicative embedding germ of a semisimple model
/// algebra on Z to an equivariant unital multiplicative embedding on a
/// neighborhood W: Shepard extension, unitalization, group averaging and
/// fiberwise rectification with the canonical separability idempotent.
template <typename Scalar>
ExtensionResult<Scalar> extend_algebra_subbundle(const BaseComplex& base, const AlgebraGerm<Scalar>& germ,
                                                 const GroupAction<Scalar>& action, const ExtensionOptions& opts = {}) {
  const MapFamily<Scalar> on_z = check_algebra_inputs(base, germ, action, opts);
  const auto& model = *germ.model;
  const auto& ambient = *germ.ambient;
  auto e = separability_idempotent(germ.model);
  if (germ.star_mode) e = star_symmetrize(e);

  const auto extended = shepard_extend(base, on_z, opts.shepard_power, opts.shepard_k);
  MapFamily<Scalar> outside;
  for (const auto& [x, m] : extended)
    if (!base.in_z(x)) outside.emplace(x, unitalize(FiberMap<Scalar>(germ.model, germ.ambient, m)).matrix);
  const MapFamily<Scalar> averaged = average_map_family(action, outside);

  const auto n = static_cast<std::size_t>(base.num_vertices());
  ExtensionResult<Scalar> result;
  result.diagnostics.resize(n);
  std::vector<Matrix<Scalar>> rectified(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    const int x = static_cast<int>(i);
    auto& d = result.diagnostics[i];
    d.vertex = x;
    d.distance_to_z = base.distance_to_z(x);
    d.in_z = base.in_z(x);
    if (d.in_z) {
      const FiberMap<Scalar> phi(germ.model, germ.ambient, on_z.at(x));
      rectified[i] = phi.matrix;
      d.defect = multiplicativity_defect(phi);
      d.injectivity_margin = injectivity_margin(phi);
      d.passed = true;
      d.status = "germ";
      return;
    }
    const auto r = rectify(FiberMap<Scalar>(germ.model, germ.ambient, averaged.at(x)), e, germ.star_mode,
                           RealOf<Scalar>(opts.rectify_tol), opts.max_iter);
    rectified[i] = r.map.matrix;
    d.defect = r.defect_trace.back();
    d.iterations = r.iterations;
    d.status = to_string(r.status);
    d.injectivity_margin = injectivity_margin(r.map);
    const bool converged = r.status == RectifyStatus::Converged;
    bool bounded = false;
    if (converged) {
      const auto b = vertex_uniform_bounds(model, ambient, r.map.matrix);
      bounded = b.K2 <= opts.K2_max && b.K0 <= opts.K0_max;
    }
    d.passed = converged && d.injectivity_margin > opts.min_injectivity_margin && bounded;
    if (converged && !d.passed) d.status = "rejected";
  });

  std::vector<bool> ok(n);
  for (std::size_t i = 0; i < n; ++i) ok[i] = result.diagnostics[i].passed;
  const auto radius = extension_radius(base, ok);
  result.radius = radius.radius;
  result.W = radius.W;
  for (int x : result.W)
    result.maps_on_w.emplace(x, base.in_z(x) ? on_z.at(x) : rectified[static_cast<std::size_t>(x)]);

  for (int x : result.W) {
    auto& d = result.diagnostics[static_cast<std::size_t>(x)];
    const auto& m = result.maps_on_w.at(x);
    d.in_w = true;
    d.unit_defect = ambient.element_norm(m * model.unit() - ambient.unit());
    d.equivariance_defect = vertex_equivariance_defect(action, result.maps_on_w, x);
  }
  result.bounds = measure_uniform_bounds(model, ambient, result.maps_on_w);
  result.continuity = norm_continuity_report(base, model, ambient, result.maps_on_w);
  detail::finalize_summary(base, result);
  return result;
}

}  // namespace prolong

#endif  // PROLONG_BUNDLE_HPP
