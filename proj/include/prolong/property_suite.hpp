#ifndef PROLONG_PROPERTY_SUITE_HPP
#define PROLONG_PROPERTY_SUITE_HPP

#include "prolong/algebra.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace prolong {

/// Outcome of one property family. `checks` are the individual pass/fail
/// conditions; `metrics` are worst-case values in a fixed order.
struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<std::pair<std::string, double>> metrics;

  bool passed() const;
  double metric(const std::string& key) const;
};

struct PropertyReport {
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<SuiteResult> suites;

  bool passed() const;
  /// Deterministic JSON rendering; identical inputs give identical bytes.
  std::string to_json() const;
};

/// A product of matrix algebras over R/C/H realized over the reals.
struct RealBlock {
  DivisionRing ring;
  Index n;
};

/// Every product of matrix blocks over R, C, H whose real dimension is at
/// most max_dim, in a fixed order.
std::vector<std::vector<RealBlock>> enumerate_real_products(Index max_dim);

/// Every product of complex matrix blocks of complex dimension <= max_dim.
std::vector<std::vector<Index>> enumerate_complex_products(Index max_dim);

Algebra<double> make_real_product(const std::vector<RealBlock>& blocks);

/// Centrality and unit defects of the canonical idempotent on every
/// product of total dimension <= max_dim, and the closed form on M_n(C).
SuiteResult separability_suite(Index max_dim = 32);

/// Canonical idempotent fixed under random inner automorphisms of M_4(C).
SuiteResult automorphism_suite(std::uint64_t seed, int trials);

/// e* = sigma(e) after symmetrization on the shipped *-algebras.
SuiteResult star_suite();

/// Quadratic contraction of tau on perturbed embeddings into M_6(C):
/// `trials` per (source, epsilon) cell.
SuiteResult contraction_suite(std::uint64_t seed, int trials);

/// Homomorphisms are fixed by tau, tau_sa, unitalize and rectify.
SuiteResult fixed_point_suite(std::uint64_t seed, int trials);

/// Averaged families are equivariant; rectification keeps equivariance.
SuiteResult equivariance_suite(std::uint64_t seed, int trials);

/// Polar factor is an isometry and no farther from the frame than random
/// isometries.
SuiteResult polar_suite(std::uint64_t seed, int trials);

/// Associativity, unit and involution laws of the shipped algebras.
SuiteResult algebra_law_suite();

/// All of the above with the given seed; `trials` >= 1 scales the
/// randomized suites.
PropertyReport run_property_suite(std::uint64_t seed, int trials);

}  // namespace prolong

#endif  // PROLONG_PROPERTY_SUITE_HPP
