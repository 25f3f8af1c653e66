#include "prolong/property_suite.hpp"

#include "prolong/bundle.hpp"
#include "prolong/germs.hpp"
#include "prolong/io.hpp"
#include "prolong/random.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace prolong {

using C = std::complex<double>;

bool SuiteResult::passed() const {
  if (failures != 0) return false;
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

double SuiteResult::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  throw std::out_of_range("no metric '" + key + "'");
}

bool PropertyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

std::string PropertyReport::to_json() const {
  std::ostringstream out;
  out << "{\n  \"format\": \"prolong-property-report/1\",\n";
  out << "  \"seed\": " << seed << ",\n  \"trials\": " << trials << ",\n";
  out << "  \"passed\": " << (passed() ? "true" : "false") << ",\n  \"suites\": [";
  for (std::size_t s = 0; s < suites.size(); ++s) {
    const auto& r = suites[s];
    out << (s ? "," : "") << "\n    {\"name\": " << json_quote(r.name) << ", \"passed\": " << (r.passed() ? "true" : "false")
        << ", \"cases\": " << r.cases << ", \"failures\": " << r.failures << ",\n     \"checks\": {";
    for (std::size_t i = 0; i < r.checks.size(); ++i)
      out << (i ? ", " : "") << json_quote(r.checks[i].first) << ": " << (r.checks[i].second ? "true" : "false");
    out << "},\n     \"metrics\": {";
    for (std::size_t i = 0; i < r.metrics.size(); ++i)
      out << (i ? ", " : "") << json_quote(r.metrics[i].first) << ": " << format_real(r.metrics[i].second);
    out << "}}";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Algebra catalogues

std::vector<std::vector<RealBlock>> enumerate_real_products(Index max_dim) {
  std::vector<RealBlock> types;
  for (auto ring : {DivisionRing::Real, DivisionRing::Complex, DivisionRing::Quaternion}) {
    const Index d = ring == DivisionRing::Real ? 1 : ring == DivisionRing::Complex ? 2 : 4;
    for (Index n = 1; d * n * n <= max_dim; ++n) types.push_back({ring, n});
  }
  auto dim_of = [](const RealBlock& b) {
    const Index d = b.ring == DivisionRing::Real ? 1 : b.ring == DivisionRing::Complex ? 2 : 4;
    return d * b.n * b.n;
  };
  std::vector<std::vector<RealBlock>> out;
  std::vector<RealBlock> current;
  std::function<void(std::size_t, Index)> rec = [&](std::size_t first, Index remaining) {
    if (!current.empty()) out.push_back(current);
    for (std::size_t t = first; t < types.size(); ++t) {
      if (dim_of(types[t]) > remaining) continue;
      current.push_back(types[t]);
      rec(t, remaining - dim_of(types[t]));
      current.pop_back();
    }
  };
  rec(0, max_dim);
  return out;
}

std::vector<std::vector<Index>> enumerate_complex_products(Index max_dim) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> current;
  std::function<void(Index, Index)> rec = [&](Index first, Index remaining) {
    if (!current.empty()) out.push_back(current);
    for (Index n = first; n * n <= remaining; ++n) {
      current.push_back(n);
      rec(n, remaining - n * n);
      current.pop_back();
    }
  };
  rec(1, max_dim);
  return out;
}

Algebra<double> make_real_product(const std::vector<RealBlock>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("make_real_product: no blocks");
  Algebra<double> out = make_matrix_algebra<double>(blocks.front().n, blocks.front().ring);
  for (std::size_t i = 1; i < blocks.size(); ++i)
    out = direct_sum(out, make_matrix_algebra<double>(blocks[i].n, blocks[i].ring));
  return out;
}

namespace {

struct Tally {
  SuiteResult result;
  std::map<std::string, double> worst;
  std::vector<std::string> order;

  explicit Tally(std::string name) { result.name = std::move(name); }

  void record(const std::string& key, double value) {
    if (!worst.count(key)) {
      order.push_back(key);
      worst[key] = value;
    } else if (!(value <= worst[key])) {
      worst[key] = value;
    }
  }

  void count(bool ok) {
    ++result.cases;
    if (!ok) ++result.failures;
  }

  SuiteResult finish() {
    for (const auto& k : order) result.metrics.emplace_back(k, worst[k]);
    return result;
  }
};

std::vector<std::shared_ptr<const Algebra<double>>> shipped_real_algebras() {
  std::vector<std::shared_ptr<const Algebra<double>>> out;
  for (auto ring : {DivisionRing::Real, DivisionRing::Complex, DivisionRing::Quaternion})
    for (Index n = 1; n <= 3; ++n) out.push_back(std::make_shared<const Algebra<double>>(make_matrix_algebra<double>(n, ring)));
  out.push_back(std::make_shared<const Algebra<double>>(
      make_real_product({{DivisionRing::Real, 1}, {DivisionRing::Quaternion, 1}})));
  out.push_back(std::make_shared<const Algebra<double>>(
      make_real_product({{DivisionRing::Complex, 1}, {DivisionRing::Real, 2}})));
  return out;
}

std::vector<std::shared_ptr<const Algebra<C>>> shipped_complex_algebras() {
  std::vector<std::shared_ptr<const Algebra<C>>> out;
  for (Index n = 1; n <= 4; ++n) out.push_back(std::make_shared<const Algebra<C>>(make_matrix_algebra<C>(n)));
  out.push_back(std::make_shared<const Algebra<C>>(make_block_algebra<C>({1, 1})));
  out.push_back(std::make_shared<const Algebra<C>>(make_block_algebra<C>({1, 2})));
  out.push_back(std::make_shared<const Algebra<C>>(make_block_algebra<C>({2, 2, 1})));
  return out;
}

template <typename Scalar>
void check_separability(Tally& t, const Algebra<Scalar>& a) {
  const auto e = separability_idempotent(a);
  const auto d = separability_defects(e);
  t.record("max_centrality_defect", d.centrality);
  t.record("max_unit_defect", d.unit);
  t.count(d.centrality <= 1e-10 && d.unit <= 1e-10);
}

// Embedding into M_N conjugated by a random unitary.
Matrix<C> random_embedding(const BlockSizes& blocks, Index N, Rng& rng) {
  return conjugated_embedding(random_unitary<C>(N, rng), standard_embedding<C>(blocks, N));
}

struct Source {
  std::string label;
  BlockSizes blocks;
};

const std::vector<Source>& contraction_sources() {
  static const std::vector<Source> sources = {{"C2", {1, 1}}, {"M2", {2}}, {"M3", {3}}, {"C+M2", {1, 2}}};
  return sources;
}

// Least-squares slope of y on x.
double fitted_slope(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= double(pts.size());
  my /= double(pts.size());
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

SuiteResult separability_suite(Index max_dim) {
  Tally t("separability");
  for (const auto& blocks : enumerate_real_products(max_dim)) check_separability(t, make_real_product(blocks));
  for (const auto& blocks : enumerate_complex_products(max_dim)) check_separability(t, make_block_algebra<C>(blocks));

  // Closed form (1/n) sum e_ij (x) e_ji on M_n(C).
  double worst_formula = 0;
  for (Index n = 1; n <= 4; ++n) {
    const auto e = separability_idempotent(make_matrix_algebra<C>(n));
    Matrix<C> expected = Matrix<C>::Zero(n * n, n * n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) expected(i * n + j, j * n + i) = C(1.0 / double(n));
    worst_formula = std::max(worst_formula, (e.coeffs - expected).cwiseAbs().maxCoeff());
  }
  t.record("max_closed_form_deviation", worst_formula);
  t.count(worst_formula <= 1e-12);
  return t.finish();
}

SuiteResult automorphism_suite(std::uint64_t seed, int trials) {
  Tally t("automorphism_invariance");
  Rng rng(seed ^ 0x2a2a2a2aULL);
  const auto e = separability_idempotent(make_matrix_algebra<C>(4));
  for (int k = 0; k < trials; ++k) {
    const Matrix<C> alpha = conjugation_matrix(random_invertible<C>(4, rng));
    const double dev = (tensor_apply(alpha, e.coeffs) - e.coeffs).cwiseAbs().maxCoeff();
    t.record("max_deviation", dev);
    t.count(dev <= 1e-9);
  }
  return t.finish();
}

SuiteResult star_suite() {
  Tally t("star_symmetrization");
  auto check = [&](const auto& algebras) {
    for (const auto& a : algebras) {
      const double d = flip_star_defect(star_symmetrize(separability_idempotent(a)));
      t.record("max_flip_star_defect", d);
      t.count(d <= 1e-12);
    }
  };
  check(shipped_real_algebras());
  check(shipped_complex_algebras());
  return t.finish();
}

SuiteResult contraction_suite(std::uint64_t seed, int trials) {
  Tally t("rectifier_contraction");
  Rng rng(seed ^ 0x5eed5eedULL);
  const Index N = 6;
  const auto target = std::make_shared<const Algebra<C>>(make_matrix_algebra<C>(N));
  const double epsilons[] = {1e-2, 1e-3, 1e-4};
  double min_fraction = 1;
  double worst_slope_error = 0;
  for (const auto& src : contraction_sources()) {
    const auto model = std::make_shared<const Algebra<C>>(make_block_algebra<C>(src.blocks));
    const auto e = separability_idempotent(model);
    std::vector<std::pair<double, double>> pairs;
    for (double eps : epsilons) {
      int quadratic = 0;
      for (int k = 0; k < trials; ++k) {
        const Matrix<C> hom = random_embedding(src.blocks, N, rng);
        const FiberMap<C> phi(model, target, hom + C(eps) * unit_noise<C>(hom.rows(), hom.cols(), rng));
        const double d0 = multiplicativity_defect(phi);
        const double d1 = multiplicativity_defect(tau_step(phi, e));
        t.record("max_ratio_d1_over_d0_squared", d1 / (d0 * d0));
        if (d1 <= 10 * d0 * d0) ++quadratic;
        const auto r = rectify(phi, e);
        const bool ok = r.status == RectifyStatus::Converged && r.iterations <= 6 && r.defect_trace.back() <= 1e-12;
        t.record("max_iterations", r.iterations);
        t.record("max_final_defect", r.defect_trace.back());
        t.count(ok);
        for (std::size_t i = 0; i + 1 < r.defect_trace.size(); ++i)
          if (r.defect_trace[i + 1] >= 1e-11)
            pairs.emplace_back(std::log(r.defect_trace[i]), std::log(r.defect_trace[i + 1]));
      }
      min_fraction = std::min(min_fraction, double(quadratic) / double(trials));
    }
    const double slope = fitted_slope(pairs);
    t.result.metrics.emplace_back("slope_" + src.label, slope);
    // A single trial may not leave two usable pairs; the slope is then not assessed.
    const bool slope_ok = std::isnan(slope) ? trials < 2 : std::abs(slope - 2) <= 0.15;
    t.result.checks.emplace_back("slope_" + src.label, slope_ok);
    if (std::isfinite(slope)) worst_slope_error = std::max(worst_slope_error, std::abs(slope - 2));
  }
  t.result.checks.emplace_back("quadratic_fraction", min_fraction >= 0.95);
  t.record("min_quadratic_fraction", min_fraction);
  t.record("max_slope_error", worst_slope_error);
  return t.finish();
}

SuiteResult fixed_point_suite(std::uint64_t seed, int trials) {
  Tally t("fixed_points");
  Rng rng(seed ^ 0xf1f1f1f1ULL);
  const Index N = 6;
  const auto target = std::make_shared<const Algebra<C>>(make_matrix_algebra<C>(N));
  for (const auto& src : contraction_sources()) {
    const auto model = std::make_shared<const Algebra<C>>(make_block_algebra<C>(src.blocks));
    const auto e = separability_idempotent(model);
    const auto e_sa = star_symmetrize(e);
    for (int k = 0; k < trials; ++k) {
      const FiberMap<C> phi(model, target, random_embedding(src.blocks, N, rng));
      const double d_tau = map_distance(tau_step(phi, e), phi);
      const double d_sa = map_distance(tau_sa_step(phi, e_sa), phi);
      const double d_unit = map_distance(unitalize(phi), phi);
      const double d_rect = map_distance(rectify(phi, e).map, phi);
      t.record("max_tau_move", d_tau);
      t.record("max_tau_sa_move", d_sa);
      t.record("max_unitalize_move", d_unit);
      t.record("max_rectify_move", d_rect);
      t.count(std::max({d_tau, d_sa, d_unit, d_rect}) <= 1e-14);
    }
  }
  return t.finish();
}

SuiteResult equivariance_suite(std::uint64_t seed, int trials) {
  Tally t("equivariance");
  Rng rng(seed ^ 0xe9e9e9e9ULL);
  const Index N = 4;
  const auto model = std::make_shared<const Algebra<C>>(make_matrix_algebra<C>(2));
  const auto target = std::make_shared<const Algebra<C>>(make_matrix_algebra<C>(N));
  const auto e = separability_idempotent(model);
  const int side = 4;
  const auto action = make_cyclic_action<C>(4, grid_rotation_permutation(side),
                                            conjugation_matrix(quarter_plane_rotation<C>(2, 1)),
                                            conjugation_matrix(quarter_plane_rotation<C>(N, 1)));
  const Matrix<C> iota = standard_embedding<C>({2}, N);
  for (int k = 0; k < trials; ++k) {
    // Exactly equivariant homomorphisms on free orbits, then noise.
    MapFamily<C> hom;
    for (int x = 0; x < action.num_vertices(); ++x) {
      if (hom.count(x)) continue;
      const Matrix<C> rep = conjugated_embedding(random_unitary<C>(N, rng), iota);
      for (int u = 0; u < action.order(); ++u)
        hom.emplace(action.act(u, x), action.target_action(u) * rep * action.source_action(action.inverse(u)));
    }
    MapFamily<C> noisy;
    for (const auto& [x, m] : hom) noisy.emplace(x, m + C(1e-3) * unit_noise<C>(m.rows(), m.cols(), rng));

    const auto averaged = average_map_family(action, noisy);
    const double d_avg = equivariance_defect(action, averaged);
    MapFamily<C> rectified;
    for (const auto& [x, m] : averaged) rectified.emplace(x, rectify(FiberMap<C>(model, target, m), e).map.matrix);
    const double d_rect = equivariance_defect(action, rectified);
    t.record("max_averaged_defect", d_avg);
    t.record("max_rectified_defect", d_rect);
    t.count(d_avg <= 1e-12 && d_rect <= 1e-10);
  }
  return t.finish();
}

SuiteResult polar_suite(std::uint64_t seed, int trials) {
  Tally t("polar_isometry");
  Rng rng(seed ^ 0x90a590a5ULL);
  for (int k = 0; k < trials; ++k) {
    const Index n = 2 + k % 4;
    const Index r = 1 + k % n;
    const Matrix<C> f = random_matrix<C>(n, r, rng);
    const Matrix<C> p = polar_isometry(f);
    const double iso = isometry_defect(p);
    const Matrix<C> q = random_unitary<C>(n, rng).leftCols(r);
    const double gap = (f - p).norm() - (f - q).norm();
    t.record("max_isometry_defect", iso);
    t.record("max_nearness_violation", gap);
    t.count(iso <= 1e-12 && gap <= 1e-12);
  }
  return t.finish();
}

SuiteResult algebra_law_suite() {
  Tally t("algebra_laws");
  auto check = [&](const auto& algebras) {
    for (const auto& a : algebras) {
      const double assoc = a->associativity_defect();
      const double unit = a->unit_defect();
      const double inv = a->involution_defect();
      t.record("max_associativity_defect", assoc);
      t.record("max_unit_defect", unit);
      t.record("max_involution_defect", inv);
      t.count(std::max({assoc, unit, inv}) <= 1e-12);
    }
  };
  check(shipped_real_algebras());
  check(shipped_complex_algebras());
  return t.finish();
}

PropertyReport run_property_suite(std::uint64_t seed, int trials) {
  if (trials < 1) throw std::invalid_argument("run_property_suite: trials must be at least 1");
  PropertyReport report;
  report.seed = seed;
  report.trials = trials;
  report.suites.push_back(algebra_law_suite());
  report.suites.push_back(separability_suite());
  report.suites.push_back(automorphism_suite(seed, trials));
  report.suites.push_back(star_suite());
  report.suites.push_back(contraction_suite(seed, trials));
  report.suites.push_back(fixed_point_suite(seed, trials));
  report.suites.push_back(equivariance_suite(seed, trials));
  report.suites.push_back(polar_suite(seed, trials));
  return report;
}

}  // namespace prolong
