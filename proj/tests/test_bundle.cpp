#include "doctest.h"

#include "prolong/bundle.hpp"
#include "prolong/germs.hpp"
#include "prolong/random.hpp"

using namespace prolong;
using C = std::complex<double>;

namespace {

BaseComplex annulus_grid(int n, double radius) {
  return make_grid_base(n, n, Box{}, [radius](const BaseComplex::Point& p) {
    return std::abs(std::hypot(p[0], p[1]) - radius) <= 0.05;
  });
}

}  // namespace

TEST_CASE("path base distances and Shepard weights by hand") {
  // v0 --1-- v1 --2-- v2 --1-- v3, Z = {v0, v3}
  const auto base = make_path_base({1.0, 2.0, 1.0}, {0, 3});
  CHECK(base.distance(0, 3) == 4.0);
  CHECK(base.distance_to_z(1) == 1.0);
  CHECK(base.distance_to_z(2) == 1.0);
  const auto w = shepard_weights(base, 1, 2.0, 4);
  // d(v1, v0) = 1, d(v1, v3) = 3: weights 1 and 1/9, normalized.
  REQUIRE(w.size() == 2);
  std::map<int, double> by_vertex(w.begin(), w.end());
  CHECK(by_vertex.at(0) == doctest::Approx(0.9));
  CHECK(by_vertex.at(3) == doctest::Approx(0.1));

  const std::map<int, double> values = {{0, 10.0}, {3, 20.0}};
  const auto ext = shepard_extend(base, values, 2.0, 4);
  CHECK(ext.at(0) == 10.0);
  CHECK(ext.at(3) == 20.0);
  CHECK(ext.at(1) == doctest::Approx(11.0));
  CHECK(ext.at(2) == doctest::Approx(19.0));
}

TEST_CASE("extension radius takes the largest passing sublevel set") {
  const auto base = make_path_base({1.0, 1.0, 1.0, 1.0}, {0});
  auto r = extension_radius(base, {true, true, true, false, true});
  CHECK(r.radius == 2.0);
  CHECK(r.W == std::vector<int>{0, 1, 2});
  r = extension_radius(base, {true, false, true, true, true});
  CHECK(r.radius == 0.0);
  CHECK(r.W == std::vector<int>{0});
  CHECK_THROWS_AS(extension_radius(base, {false, true, true, true, true}), std::invalid_argument);
}

TEST_CASE("base complex validation") {
  CHECK_THROWS_AS(make_path_base({1.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(BaseComplex(3, {{0, 1, 1.0}}, {true, false, false}), std::invalid_argument);
  CHECK_THROWS_AS(make_path_base({-1.0}, {0}), std::invalid_argument);
  const auto grid = annulus_grid(5, 1.0);
  CHECK(grid.is_automorphism(grid_rotation_permutation(5)));
}

TEST_CASE("polar isometry matches F (F^H F)^(-1/2)") {
  Rng rng(31);
  for (int t = 0; t < 5; ++t) {
    const Matrix<C> f = random_matrix<C>(5, 3, rng);
    Eigen::SelfAdjointEigenSolver<Matrix<C>> eig(f.adjoint() * f);
    const Matrix<C> inv_sqrt = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                               eig.eigenvectors().adjoint();
    const Matrix<C> p = polar_isometry(f);
    CHECK((p - f * inv_sqrt).norm() <= 1e-12);
    CHECK(isometry_defect(p) <= 1e-14);
  }
  Matrix<double> rank_one(3, 2);
  rank_one << 1, 2, 1, 2, 1, 2;
  CHECK_THROWS_AS(polar_isometry(rank_one), std::domain_error);
}

TEST_CASE("frame bundle extension of the tangent line field") {
  const auto base = annulus_grid(11, 0.6);
  FrameGerm<double> germ{1, 2, tangent_line_germ<double>(base)};
  const auto action =
      make_cyclic_action<double>(4, grid_rotation_permutation(11), Matrix<double>::Identity(1, 1), quarter_plane_rotation<double>(2, 1));
  const auto r = extend_frame_bundle(base, germ, action);
  CHECK(r.radius > 0);
  CHECK(r.W.size() > base.z_vertices().size());
  CHECK(restriction_defect(base, germ.frames_on_z, r.maps_on_w) == 0.0);
  for (const auto& [x, f] : r.maps_on_w) CHECK(isometry_defect(f) <= 1e-12);
  CHECK(equivariance_defect(action, r.maps_on_w) <= 1e-10);
  // The center is fixed by the rotation, so an invariant tangent vector there is zero.
  CHECK_FALSE(r.maps_on_w.count(60));
}

TEST_CASE("algebra subbundle extension with rotation symmetry") {
  const auto base = annulus_grid(11, 0.6);
  auto model = std::make_shared<const Algebra<C>>(make_block_algebra<C>({1, 1}));
  auto ambient = std::make_shared<const Algebra<C>>(make_matrix_algebra<C>(4));
  AlgebraGerm<C> germ{model, ambient, rotated_embedding_germ<C>(base, {1, 1}, 4, 1.0), false};
  const auto action = make_cyclic_action<C>(4, grid_rotation_permutation(11), Matrix<C>::Identity(2, 2),
                                            conjugation_matrix(quarter_plane_rotation<C>(4, 1)));
  ExtensionOptions opts;
  const auto r = extend_algebra_subbundle(base, germ, action, opts);
  CHECK(r.radius > 0);
  CHECK(restriction_defect(base, germ.maps_on_z, r.maps_on_w) == 0.0);
  CHECK(r.max_defect <= 1e-10);
  CHECK(r.max_equivariance_defect <= 1e-10);
  CHECK(std::isfinite(r.bounds.K2));
  CHECK(std::isfinite(r.bounds.K0));
  // Soundness: nothing inside W exceeds the tolerance.
  for (const auto& d : r.diagnostics)
    if (d.in_w && !d.in_z) CHECK(d.defect <= opts.rectify_tol);

  opts.threads = 3;
  const auto threaded = extend_algebra_subbundle(base, germ, action, opts);
  CHECK(threaded.W == r.W);
  for (const auto& [x, m] : r.maps_on_w) CHECK((threaded.maps_on_w.at(x) - m).norm() == 0.0);
}

TEST_CASE("a germ that traps rectification gives W = Z") {
  const auto base = make_grid_base(5, 3, Box{}, [](const BaseComplex::Point& p) { return std::abs(p[0]) >= 0.5; });
  auto model = std::make_shared<const Algebra<C>>(make_block_algebra<C>({1, 1}));
  auto ambient = std::make_shared<const Algebra<C>>(make_matrix_algebra<C>(2));
  AlgebraGerm<C> germ{model, ambient, split_embedding_germ<C>(base, {1, 1}, 2, 0.0), false};
  const auto action = make_cyclic_action<C>(1, std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14},
                                            Matrix<C>::Identity(2, 2), Matrix<C>::Identity(4, 4));
  const auto r = extend_algebra_subbundle(base, germ, action);
  CHECK(r.degenerate);
  CHECK(r.W == base.z_vertices());
  CHECK(r.radius == 0.0);
}

TEST_CASE("pipeline input checks") {
  const auto base = annulus_grid(11, 0.6);
  auto model = std::make_shared<const Algebra<C>>(make_block_algebra<C>({1, 1}));
  auto ambient = std::make_shared<const Algebra<C>>(make_matrix_algebra<C>(4));
  const auto rot = make_cyclic_action<C>(4, grid_rotation_permutation(11), Matrix<C>::Identity(2, 2),
                                         conjugation_matrix(quarter_plane_rotation<C>(4, 1)));
  // A constant germ is not equivariant under the rotation action.
  AlgebraGerm<C> constant{model, ambient, constant_germ<C>(base, standard_embedding<C>({1, 1}, 4)), false};
  const auto frozen = rotated_embedding_germ<C>(base, {1, 1}, 4, 1.0);
  CHECK_NOTHROW(check_algebra_inputs(base, AlgebraGerm<C>{model, ambient, frozen, false}, rot));
  CHECK_THROWS_AS(check_algebra_inputs(base, constant, rot), std::invalid_argument);
  AlgebraGerm<C> scaled = constant;
  for (auto& [z, m] : scaled.maps_on_z) m *= C(2);
  CHECK_THROWS_AS(check_algebra_inputs(base, scaled, rot), std::invalid_argument);
  AlgebraGerm<C> missing{model, ambient, frozen, false};
  missing.maps_on_z.erase(missing.maps_on_z.begin());
  CHECK_THROWS_AS(check_algebra_inputs(base, missing, rot), std::invalid_argument);
  auto dual = std::make_shared<const Algebra<C>>(make_dual_numbers<C>());
  CHECK_THROWS_AS(check_algebra_inputs(base, AlgebraGerm<C>{dual, ambient, {}, false}, rot), std::domain_error);
}
