#include "prolong/base_complex.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

namespace prolong {

namespace {
constexpr double kLevelTolerance = 1e-9;
}  // namespace

BaseComplex::BaseComplex(int num_vertices, std::vector<Edge> edges, std::vector<bool> in_z,
                         std::vector<Point> coordinates)
    : num_vertices_(num_vertices),
      edges_(std::move(edges)),
      in_z_(std::move(in_z)),
      coordinates_(std::move(coordinates)) {
  if (num_vertices_ < 1) throw std::invalid_argument("base complex: no vertices");
  if (static_cast<int>(in_z_.size()) != num_vertices_) throw std::invalid_argument("base complex: Z mask has wrong length");
  if (!coordinates_.empty() && static_cast<int>(coordinates_.size()) != num_vertices_)
    throw std::invalid_argument("base complex: coordinate list has wrong length");

  std::vector<std::vector<std::pair<int, double>>> adjacency(static_cast<std::size_t>(num_vertices_));
  for (const auto& e : edges_) {
    if (e.a < 0 || e.b < 0 || e.a >= num_vertices_ || e.b >= num_vertices_ || e.a == e.b)
      throw std::invalid_argument("base complex: invalid edge endpoints");
    if (!(e.length > 0)) throw std::invalid_argument("base complex: edge lengths must be positive");
    adjacency[static_cast<std::size_t>(e.a)].emplace_back(e.b, e.length);
    adjacency[static_cast<std::size_t>(e.b)].emplace_back(e.a, e.length);
  }

  const double inf = std::numeric_limits<double>::infinity();
  metric_.assign(static_cast<std::size_t>(num_vertices_) * static_cast<std::size_t>(num_vertices_), inf);
  using Item = std::pair<double, int>;
  for (int s = 0; s < num_vertices_; ++s) {
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    metric_[index(s, s)] = 0;
    queue.emplace(0.0, s);
    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (d > metric_[index(s, v)]) continue;
      for (const auto& [w, len] : adjacency[static_cast<std::size_t>(v)]) {
        const double nd = d + len;
        if (nd < metric_[index(s, w)]) {
          metric_[index(s, w)] = nd;
          queue.emplace(nd, w);
        }
      }
    }
  }
  for (int v = 0; v < num_vertices_; ++v)
    if (metric_[index(0, v)] == inf) throw std::invalid_argument("base complex: graph is not connected");

  for (int v = 0; v < num_vertices_; ++v)
    if (in_z_[static_cast<std::size_t>(v)]) z_vertices_.push_back(v);
  if (z_vertices_.empty()) throw std::invalid_argument("base complex: Z is empty");

  distance_to_z_.assign(static_cast<std::size_t>(num_vertices_), inf);
  for (int v = 0; v < num_vertices_; ++v)
    for (int z : z_vertices_) distance_to_z_[static_cast<std::size_t>(v)] = std::min(distance_to_z_[static_cast<std::size_t>(v)], distance(v, z));
}

bool BaseComplex::is_automorphism(const std::vector<int>& perm, double tol) const {
  if (static_cast<int>(perm.size()) != num_vertices_) return false;
  for (int x = 0; x < num_vertices_; ++x)
    for (int y = 0; y < num_vertices_; ++y)
      if (std::abs(distance(x, y) - distance(perm[static_cast<std::size_t>(x)], perm[static_cast<std::size_t>(y)])) > tol)
        return false;
  return true;
}

BaseComplex make_grid_base(int nx, int ny, const Box& box,
                           const std::function<bool(const BaseComplex::Point&)>& z_predicate) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid base: need at least 2 vertices per side");
  if (!(box.x_max > box.x_min) || !(box.y_max > box.y_min)) throw std::invalid_argument("grid base: empty box");
  const double hx = (box.x_max - box.x_min) / (nx - 1);
  const double hy = (box.y_max - box.y_min) / (ny - 1);
  std::vector<BaseComplex::Point> coords;
  std::vector<bool> in_z;
  std::vector<Edge> edges;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const BaseComplex::Point p{box.x_min + ix * hx, box.y_min + iy * hy};
      coords.push_back(p);
      in_z.push_back(z_predicate(p));
      const int v = iy * nx + ix;
      if (ix + 1 < nx) edges.push_back({v, v + 1, hx});
      if (iy + 1 < ny) edges.push_back({v, v + nx, hy});
    }
  return BaseComplex(nx * ny, std::move(edges), std::move(in_z), std::move(coords));
}

BaseComplex make_path_base(const std::vector<double>& lengths, const std::vector<int>& z) {
  const int n = static_cast<int>(lengths.size()) + 1;
  std::vector<Edge> edges;
  std::vector<BaseComplex::Point> coords{{0.0, 0.0}};
  for (int i = 0; i + 1 < n; ++i) {
    edges.push_back({i, i + 1, lengths[static_cast<std::size_t>(i)]});
    coords.push_back({coords.back()[0] + lengths[static_cast<std::size_t>(i)], 0.0});
  }
  std::vector<bool> in_z(static_cast<std::size_t>(n), false);
  for (int v : z) {
    if (v < 0 || v >= n) throw std::invalid_argument("path base: Z vertex out of range");
    in_z[static_cast<std::size_t>(v)] = true;
  }
  return BaseComplex(n, std::move(edges), std::move(in_z), std::move(coords));
}

std::vector<int> grid_rotation_permutation(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) perm[static_cast<std::size_t>(iy * n + ix)] = ix * n + (n - 1 - iy);
  return perm;
}

std::vector<int> grid_reflection_permutation(int nx, int ny) {
  std::vector<int> perm(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) perm[static_cast<std::size_t>(iy * nx + ix)] = iy * nx + (nx - 1 - ix);
  return perm;
}

std::vector<std::pair<int, double>> shepard_weights(const BaseComplex& base, int x, double power, int k) {
  if (base.in_z(x)) return {{x, 1.0}};
  std::vector<std::pair<double, int>> near;
  near.reserve(base.z_vertices().size());
  for (int z : base.z_vertices()) near.emplace_back(base.distance(x, z), z);
  std::sort(near.begin(), near.end());
  std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), near.size());
  const double cutoff = near[take - 1].first;
  while (take < near.size() && near[take].first <= cutoff * (1 + kLevelTolerance)) ++take;
  std::vector<std::pair<int, double>> weights;
  double total = 0;
  for (std::size_t i = 0; i < take; ++i) {
    const double w = std::pow(near[i].first, -power);
    weights.emplace_back(near[i].second, w);
    total += w;
  }
  for (auto& [z, w] : weights) w /= total;
  return weights;
}

RadiusResult extension_radius(const BaseComplex& base, const std::vector<bool>& per_vertex_ok) {
  if (static_cast<int>(per_vertex_ok.size()) != base.num_vertices())
    throw std::invalid_argument("extension_radius: pass mask has wrong length");
  for (int z : base.z_vertices())
    if (!per_vertex_ok[static_cast<std::size_t>(z)])
      throw std::invalid_argument("extension_radius: Z vertex " + std::to_string(z) + " does not pass");

  std::vector<std::pair<double, int>> order;
  for (int v = 0; v < base.num_vertices(); ++v) order.emplace_back(base.distance_to_z(v), v);
  std::sort(order.begin(), order.end());

  RadiusResult result;
  std::size_t i = 0;
  while (i < order.size()) {
    const double level = order[i].first;
    std::size_t j = i;
    bool all_pass = true;
    // Path sums that agree up to rounding belong to one level.
    while (j < order.size() && order[j].first <= level + kLevelTolerance * std::max(1.0, level)) {
      all_pass = all_pass && per_vertex_ok[static_cast<std::size_t>(order[j].second)];
      ++j;
    }
    if (!all_pass) break;
    result.radius = order[j - 1].first;
    i = j;
  }
  for (std::size_t v = 0; v < i; ++v) result.W.push_back(order[v].second);
  std::sort(result.W.begin(), result.W.end());
  return result;
}

}  // namespace prolong
