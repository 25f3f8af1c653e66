#ifndef PROLONG_BASE_COMPLEX_HPP
#define PROLONG_BASE_COMPLEX_HPP

#include "prolong/types.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace prolong {

struct Edge {
  int a;
  int b;
  double length;
};

/// A finite connected weighted graph with shortest-path metric and a
/// marked nonempty closed subset Z.
class BaseComplex {
 public:
  using Point = std::array<double, 2>;

  BaseComplex(int num_vertices, std::vector<Edge> edges, std::vector<bool> in_z,
              std::vector<Point> coordinates = {});

  int num_vertices() const { return num_vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double distance(int x, int y) const { return metric_[index(x, y)]; }
  double distance_to_z(int x) const { return distance_to_z_[static_cast<std::size_t>(x)]; }
  bool in_z(int x) const { return in_z_[static_cast<std::size_t>(x)]; }
  const std::vector<bool>& z_mask() const { return in_z_; }
  const std::vector<int>& z_vertices() const { return z_vertices_; }
  bool has_coordinates() const { return !coordinates_.empty(); }
  const Point& coordinates(int x) const { return coordinates_.at(static_cast<std::size_t>(x)); }

  /// True when the permutation preserves adjacency and edge lengths.
  bool is_automorphism(const std::vector<int>& perm, double tol = 1e-12) const;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(num_vertices_) + static_cast<std::size_t>(y);
  }

  int num_vertices_;
  std::vector<Edge> edges_;
  std::vector<double> metric_;
  std::vector<bool> in_z_;
  std::vector<int> z_vertices_;
  std::vector<double> distance_to_z_;
  std::vector<Point> coordinates_;
};

struct Box {
  double x_min = -1;
  double x_max = 1;
  double y_min = -1;
  double y_max = 1;
};

/// nx x ny grid over the box; vertex (ix, iy) has index iy * nx + ix and
/// edges have the coordinate spacing as length.
BaseComplex make_grid_base(int nx, int ny, const Box& box,
                           const std::function<bool(const BaseComplex::Point&)>& z_predicate);

/// Path v0 - v1 - ... with the given edge lengths.
BaseComplex make_path_base(const std::vector<double>& lengths, const std::vector<int>& z);

/// Quarter turn (x, y) -> (-y, x) of a square grid on a centered box.
std::vector<int> grid_rotation_permutation(int n);

/// Mirror (x, y) -> (-x, y) of an nx x ny grid on a centered box.
std::vector<int> grid_reflection_permutation(int nx, int ny);

/// Inverse-distance weights: for x outside Z the k nearest Z vertices
/// (ties at the k-th distance included) weighted by d^-power and
/// normalized. Z vertices carry weight 1 on themselves.
std::vector<std::pair<int, double>> shepard_weights(const BaseComplex& base, int x, double power, int k);

/// Extends values given on Z to every vertex; Z values are returned as given.
template <typename Value>
std::map<int, Value> shepard_extend(const BaseComplex& base, const std::map<int, Value>& values_on_z,
                                    double power = 2.0, int k = 4) {
  if (k < 1) throw std::invalid_argument("shepard_extend: k must be at least 1");
  if (!(power > 0)) throw std::invalid_argument("shepard_extend: power must be positive");
  for (int z : base.z_vertices())
    if (!values_on_z.count(z)) throw std::invalid_argument("shepard_extend: missing value on Z vertex " + std::to_string(z));
  std::map<int, Value> out;
  for (int x = 0; x < base.num_vertices(); ++x) {
    if (base.in_z(x)) {
      out.emplace(x, values_on_z.at(x));
      continue;
    }
    const auto weights = shepard_weights(base, x, power, k);
    Value acc = values_on_z.at(weights.front().first) * weights.front().second;
    for (std::size_t i = 1; i < weights.size(); ++i) acc += values_on_z.at(weights[i].first) * weights[i].second;
    out.emplace(x, std::move(acc));
  }
  return out;
}

struct RadiusResult {
  double radius = 0;
  std::vector<int> W;
};

/// Largest sublevel set {d(x, Z) <= r} on which every vertex passes.
RadiusResult extension_radius(const BaseComplex& base, const std::vector<bool>& per_vertex_ok);

}  // namespace prolong

#endif  // PROLONG_BASE_COMPLEX_HPP
