#include "prolong/scenario.hpp"

#include "prolong/germs.hpp"
#include "prolong/io.hpp"
#include "prolong/random.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace prolong {

using nlohmann::json;

namespace {

// A JSON value together with its pointer for error messages.
struct Node {
  const json& value;
  std::string pointer;

  Node child(const std::string& key) const { return {value.at(key), pointer + "/" + key}; }
  Node element(std::size_t i) const { return {value.at(i), pointer + "/" + std::to_string(i)}; }
  bool has(const std::string& key) const { return value.is_object() && value.contains(key); }
  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(pointer.empty() ? "/" : pointer, message); }
};

void require_object(const Node& n, std::initializer_list<const char*> allowed) {
  if (!n.value.is_object()) n.fail("expected an object");
  std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : n.value.items())
    if (!keys.count(key)) n.fail("unknown key '" + key + "'");
}

double read_number(const Node& n) {
  if (!n.value.is_number()) n.fail("expected a number");
  return n.value.get<double>();
}

double read_positive(const Node& n) {
  const double v = read_number(n);
  if (!(v > 0) || !std::isfinite(v)) n.fail("expected a positive number");
  return v;
}

long long read_integer(const Node& n) {
  if (!n.value.is_number_integer()) n.fail("expected an integer");
  return n.value.get<long long>();
}

int read_int_at_least(const Node& n, long long lo) {
  const long long v = read_integer(n);
  if (v < lo || v > 1'000'000) n.fail("expected an integer >= " + std::to_string(lo));
  return static_cast<int>(v);
}

std::string read_string(const Node& n) {
  if (!n.value.is_string()) n.fail("expected a string");
  return n.value.get<std::string>();
}

std::string read_choice(const Node& n, std::initializer_list<const char*> choices) {
  const std::string s = read_string(n);
  std::string list;
  for (const char* c : choices) {
    if (s == c) return s;
    list += list.empty() ? c : std::string(", ") + c;
  }
  n.fail("expected one of: " + list);
}

bool read_bool(const Node& n) {
  if (!n.value.is_boolean()) n.fail("expected true or false");
  return n.value.get<bool>();
}

template <typename T, typename Fn>
std::vector<T> read_array(const Node& n, Fn&& read_one) {
  if (!n.value.is_array()) n.fail("expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < n.value.size(); ++i) out.push_back(read_one(n.element(i)));
  return out;
}

std::complex<double> read_complex(const Node& n) {
  if (n.value.is_number()) return {n.value.get<double>(), 0.0};
  if (n.value.is_array() && n.value.size() == 2 && n.value[0].is_number() && n.value[1].is_number())
    return {n.value[0].get<double>(), n.value[1].get<double>()};
  n.fail("expected a scalar or [re, im]");
}

ZPredicateSpec parse_z(const Node& n) {
  require_object(n, {"type", "center", "radius", "width", "lo", "hi", "vertices"});
  ZPredicateSpec z;
  if (!n.has("type")) n.fail("missing key 'type'");
  z.type = read_choice(n.child("type"), {"annulus", "all", "columns", "vertices"});
  if (n.has("center")) {
    const auto c = read_array<double>(n.child("center"), read_number);
    if (c.size() != 2) n.child("center").fail("expected two coordinates");
    z.center = {c[0], c[1]};
  }
  if (n.has("radius")) z.radius = read_positive(n.child("radius"));
  if (n.has("width")) z.width = read_positive(n.child("width"));
  if (n.has("lo")) z.lo = read_number(n.child("lo"));
  if (n.has("hi")) z.hi = read_number(n.child("hi"));
  if (n.has("vertices")) z.vertices = read_array<int>(n.child("vertices"), [](const Node& v) { return read_int_at_least(v, 0); });
  if (z.type == "vertices" && z.vertices.empty()) n.fail("Z predicate 'vertices' needs a nonempty vertex list");
  return z;
}

BaseSpec parse_base(const Node& n) {
  require_object(n, {"type", "nx", "ny", "box", "lengths", "z"});
  BaseSpec b;
  if (n.has("type")) b.type = read_choice(n.child("type"), {"grid", "path"});
  if (b.type == "grid") {
    if (n.has("nx")) b.nx = read_int_at_least(n.child("nx"), 2);
    if (n.has("ny")) b.ny = read_int_at_least(n.child("ny"), 2);
    if (n.has("box")) {
      const auto box = read_array<double>(n.child("box"), read_number);
      if (box.size() != 4 || !(box[0] < box[1]) || !(box[2] < box[3]))
        n.child("box").fail("expected [x_min, x_max, y_min, y_max] with min < max");
      b.box = {box[0], box[1], box[2], box[3]};
    }
  } else {
    if (!n.has("lengths")) n.fail("path base needs 'lengths'");
    b.path_lengths = read_array<double>(n.child("lengths"), read_positive);
    if (b.path_lengths.empty()) n.child("lengths").fail("expected at least one edge");
  }
  if (!n.has("z")) n.fail("missing key 'z'");
  b.z = parse_z(n.child("z"));
  if (b.type == "path" && b.z.type != "vertices" && b.z.type != "all")
    n.child("z").fail("path bases support the 'vertices' and 'all' predicates only");
  return b;
}

AlgebraSpec parse_algebra_spec(const Node& n) {
  require_object(n, {"blocks", "file"});
  AlgebraSpec a;
  if (n.has("blocks") == n.has("file")) n.fail("give exactly one of 'blocks' or 'file'");
  if (n.has("blocks")) {
    const auto blocks = read_array<int>(n.child("blocks"), [](const Node& v) { return read_int_at_least(v, 1); });
    if (blocks.empty()) n.child("blocks").fail("expected at least one block");
    a.blocks.assign(blocks.begin(), blocks.end());
  } else {
    a.file = read_string(n.child("file"));
  }
  return a;
}

GermSpec parse_germ(const Node& n) {
  require_object(n, {"family", "frequency", "amplitude", "split", "seed", "table"});
  GermSpec g;
  if (!n.has("family")) n.fail("missing key 'family'");
  g.family = read_choice(n.child("family"), {"rotated-projection", "split-rotation", "constant", "perturbed-identity",
                                              "tangent-line", "table"});
  if (n.has("frequency")) g.frequency = read_number(n.child("frequency"));
  if (n.has("amplitude")) g.amplitude = read_number(n.child("amplitude"));
  if (n.has("split")) g.split = read_number(n.child("split"));
  if (n.has("seed")) {
    const Node s = n.child("seed");
    if (!s.value.is_number_unsigned()) s.fail("expected a nonnegative integer");
    g.seed = s.value.get<std::uint64_t>();
  }
  if (g.family == "table") {
    if (!n.has("table")) n.fail("germ family 'table' needs 'table'");
    const Node t = n.child("table");
    if (!t.value.is_object()) t.fail("expected an object mapping vertex ids to row-major matrices");
    for (const auto& [key, _] : t.value.items()) {
      const Node entry = t.child(key);
      int vertex = -1;
      try {
        std::size_t used = 0;
        vertex = std::stoi(key, &used);
        if (used != key.size()) vertex = -1;
      } catch (const std::exception&) {
      }
      if (vertex < 0) entry.fail("table keys must be vertex ids");
      g.table.emplace(vertex, read_array<std::complex<double>>(entry, read_complex));
    }
  }
  return g;
}

ActionSpec parse_action(const Node& n) {
  require_object(n, {"type", "source", "target", "source_matrix", "target_matrix"});
  ActionSpec a;
  if (n.has("type")) a.type = read_choice(n.child("type"), {"trivial", "grid-rotation", "grid-reflection"});
  const auto fiber = {"identity", "rotation", "rotation-conjugation", "matrix"};
  if (n.has("source")) a.source = read_choice(n.child("source"), fiber);
  if (n.has("target")) a.target = read_choice(n.child("target"), fiber);
  if (n.has("source_matrix")) a.source_matrix = read_array<std::complex<double>>(n.child("source_matrix"), read_complex);
  if (n.has("target_matrix")) a.target_matrix = read_array<std::complex<double>>(n.child("target_matrix"), read_complex);
  if (a.source == "matrix" && a.source_matrix.empty()) n.fail("source 'matrix' needs 'source_matrix'");
  if (a.target == "matrix" && a.target_matrix.empty()) n.fail("target 'matrix' needs 'target_matrix'");
  return a;
}

void parse_tolerances(const Node& n, ExtensionOptions& o) {
  require_object(n, {"rectify", "max_iter", "equivariance", "germ", "min_injectivity_margin", "K2_max", "K0_max"});
  if (n.has("rectify")) o.rectify_tol = read_positive(n.child("rectify"));
  if (n.has("max_iter")) o.max_iter = read_int_at_least(n.child("max_iter"), 1);
  if (n.has("equivariance")) o.equivariance_tol = read_positive(n.child("equivariance"));
  if (n.has("germ")) o.germ_tol = read_positive(n.child("germ"));
  if (n.has("min_injectivity_margin")) o.min_injectivity_margin = read_positive(n.child("min_injectivity_margin"));
  if (n.has("K2_max")) o.K2_max = read_positive(n.child("K2_max"));
  if (n.has("K0_max")) o.K0_max = read_positive(n.child("K0_max"));
}

// ---------------------------------------------------------------------------
// Object construction

BaseComplex build_base(const BaseSpec& spec) {
  try {
    if (spec.type == "path") {
      std::vector<int> z = spec.z.vertices;
      if (spec.z.type == "all")
        for (int v = 0; v <= static_cast<int>(spec.path_lengths.size()); ++v) z.push_back(v);
      return make_path_base(spec.path_lengths, z);
    }
    const auto& zs = spec.z;
    std::function<bool(const BaseComplex::Point&)> pred;
    if (zs.type == "all") {
      pred = [](const BaseComplex::Point&) { return true; };
    } else if (zs.type == "annulus") {
      pred = [zs](const BaseComplex::Point& p) {
        return std::abs(std::hypot(p[0] - zs.center[0], p[1] - zs.center[1]) - zs.radius) <= zs.width;
      };
    } else if (zs.type == "columns") {
      pred = [zs](const BaseComplex::Point& p) { return p[0] <= zs.lo || p[0] >= zs.hi; };
    } else {
      const int n = spec.nx * spec.ny;
      for (int v : zs.vertices)
        if (v >= n) throw ConfigError("/base/z/vertices", "vertex " + std::to_string(v) + " is outside the grid");
      std::vector<bool> mask(static_cast<std::size_t>(n), false);
      for (int v : zs.vertices) mask[static_cast<std::size_t>(v)] = true;
      // Grid vertices are enumerated row-major, so a counter recovers the id.
      auto counter = std::make_shared<int>(0);
      pred = [mask, counter](const BaseComplex::Point&) { return bool(mask[static_cast<std::size_t>((*counter)++)]); };
    }
    return make_grid_base(spec.nx, spec.ny, spec.box, pred);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/base", e.what());
  }
}

template <typename Scalar>
std::shared_ptr<const Algebra<Scalar>> build_algebra(const AlgebraSpec& spec, const std::filesystem::path& dir,
                                                    const std::string& where) {
  try {
    if (!spec.file.empty()) {
      const auto path = dir / spec.file;
      std::ifstream in(path);
      if (!in) throw ConfigError(where + "/file", "cannot read '" + path.string() + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      return std::make_shared<const Algebra<Scalar>>(parse_algebra<Scalar>(buf.str()));
    }
    return std::make_shared<const Algebra<Scalar>>(make_block_algebra<Scalar>(spec.blocks));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where, e.what());
  }
}

template <typename Scalar>
Matrix<Scalar> matrix_from_list(const std::vector<std::complex<double>>& list, Index rows, Index cols,
                                const std::string& where) {
  if (static_cast<Index>(list.size()) != rows * cols)
    throw ConfigError(where, "expected " + std::to_string(rows * cols) + " entries");
  Matrix<Scalar> m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const auto v = list[static_cast<std::size_t>(r * cols + c)];
      if constexpr (is_complex_v<Scalar>) {
        m(r, c) = v;
      } else {
        if (v.imag() != 0) throw ConfigError(where, "complex entry in a real scenario");
        m(r, c) = v.real();
      }
    }
  return m;
}

std::optional<Index> single_block(const AlgebraSpec& spec) {
  if (spec.file.empty() && spec.blocks.size() == 1) return spec.blocks.front();
  return std::nullopt;
}

template <typename Scalar>
Matrix<Scalar> fiber_generator(const std::string& kind, const std::vector<std::complex<double>>& entries, Index dim,
                               std::optional<Index> matrix_size, const std::string& where) {
  if (kind == "identity") return Matrix<Scalar>::Identity(dim, dim);
  if (kind == "matrix") return matrix_from_list<Scalar>(entries, dim, dim, where + "_matrix");
  if (kind == "rotation") {
    if (dim % 2 != 0) throw ConfigError(where, "'rotation' needs an even fiber dimension");
    return quarter_plane_rotation<Scalar>(dim, 1);
  }
  if (!matrix_size || *matrix_size % 2 != 0)
    throw ConfigError(where, "'rotation-conjugation' needs a single matrix block of even size");
  return conjugation_matrix(quarter_plane_rotation<Scalar>(*matrix_size, 1));
}

template <typename Scalar>
GroupAction<Scalar> build_action(const ScenarioConfig& c, Index source_dim, Index target_dim) {
  const bool algebra = c.mode == "algebra";
  if (!algebra && (c.action.source == "rotation-conjugation" || c.action.target == "rotation-conjugation"))
    throw ConfigError("/action", "'rotation-conjugation' applies to algebra fibers only");
  const auto src = fiber_generator<Scalar>(c.action.source, c.action.source_matrix, source_dim,
                                           algebra ? single_block(c.model) : std::nullopt, "/action/source");
  const auto tgt = fiber_generator<Scalar>(c.action.target, c.action.target_matrix, target_dim,
                                           algebra ? single_block(c.ambient) : std::nullopt, "/action/target");
  const int n = c.base.type == "grid" ? c.base.nx * c.base.ny : static_cast<int>(c.base.path_lengths.size()) + 1;
  try {
    if (c.action.type == "trivial") {
      std::vector<int> id(static_cast<std::size_t>(n));
      for (int v = 0; v < n; ++v) id[static_cast<std::size_t>(v)] = v;
      return make_cyclic_action<Scalar>(1, id, Matrix<Scalar>::Identity(source_dim, source_dim),
                                        Matrix<Scalar>::Identity(target_dim, target_dim));
    }
    if (c.base.type != "grid") throw ConfigError("/action/type", "grid actions need a grid base");
    if (c.action.type == "grid-rotation") {
      if (c.base.nx != c.base.ny) throw ConfigError("/action/type", "grid rotation needs a square grid");
      return make_cyclic_action<Scalar>(4, grid_rotation_permutation(c.base.nx), src, tgt);
    }
    return make_cyclic_action<Scalar>(2, grid_reflection_permutation(c.base.nx, c.base.ny), src, tgt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/action", e.what());
  }
}

template <typename Scalar>
Matrix<Scalar> skew_direction(Index n, Rng& rng) {
  const Matrix<Scalar> g = random_matrix<Scalar>(n, n, rng);
  const Matrix<Scalar> s = (g - g.adjoint()) / Scalar(2);
  const double norm = spectral_norm(s);
  return norm > 0 ? Matrix<Scalar>(s / Scalar(norm)) : s;
}

template <typename Scalar>
MapFamily<Scalar> table_germ(const BaseComplex& base, const GermSpec& g, Index rows, Index cols) {
  MapFamily<Scalar> out;
  for (const auto& [v, entries] : g.table) {
    const std::string where = "/germ/table/" + std::to_string(v);
    if (v >= base.num_vertices() || !base.in_z(v)) throw ConfigError(where, "vertex is not in Z");
    out.emplace(v, matrix_from_list<Scalar>(entries, rows, cols, where));
  }
  for (int z : base.z_vertices())
    if (!out.count(z)) throw ConfigError("/germ/table", "no value for Z vertex " + std::to_string(z));
  return out;
}

template <typename Scalar>
MapFamily<Scalar> build_algebra_germ(const ScenarioConfig& c, const BaseComplex& base, const Algebra<Scalar>& model,
                                     const Algebra<Scalar>& ambient) {
  const auto& g = c.germ;
  if (g.family == "table") return table_germ<Scalar>(base, g, ambient.dim(), model.dim());
  if (g.family == "tangent-line") throw ConfigError("/germ/family", "'tangent-line' is a hilbert-mode family");
  if (!c.model.file.empty()) throw ConfigError("/germ/family", "named germ families need a block model algebra");
  const auto N = single_block(c.ambient);
  if (!N) throw ConfigError("/ambient", "named germ families need a single-block ambient algebra");
  try {
    if (g.family == "rotated-projection") return rotated_embedding_germ<Scalar>(base, c.model.blocks, *N, g.frequency);
    if (g.family == "split-rotation") return split_embedding_germ<Scalar>(base, c.model.blocks, *N, g.split);
    if (g.family == "constant") return constant_germ(base, standard_embedding<Scalar>(c.model.blocks, *N));
    Rng rng(g.seed);
    const auto a = skew_direction<Scalar>(*N, rng);
    const auto b = skew_direction<Scalar>(*N, rng);
    return perturbed_identity_germ<Scalar>(base, c.model.blocks, *N, g.amplitude, a, b);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/germ", e.what());
  }
}

template <typename Scalar>
MapFamily<Scalar> build_frame_germ(const ScenarioConfig& c, const BaseComplex& base) {
  const auto& g = c.germ;
  if (g.family == "table") return table_germ<Scalar>(base, g, c.hilbert_ambient, c.hilbert_rank);
  if (g.family == "tangent-line") {
    if (c.hilbert_rank != 1 || c.hilbert_ambient != 2) throw ConfigError("/hilbert", "'tangent-line' needs rank 1 in dimension 2");
    return tangent_line_germ<Scalar>(base);
  }
  if (g.family == "constant")
    return constant_germ(base, Matrix<Scalar>(Matrix<Scalar>::Identity(c.hilbert_ambient, c.hilbert_rank)));
  throw ConfigError("/germ/family", "family '" + g.family + "' is an algebra-mode family");
}

// Everything a run needs, built and checked before any extension work.
template <typename Scalar>
struct Prepared {
  BaseComplex base;
  std::shared_ptr<const Algebra<Scalar>> model;
  std::shared_ptr<const Algebra<Scalar>> ambient;
  GroupAction<Scalar> action;
  MapFamily<Scalar> germ;
};

template <typename Scalar>
Prepared<Scalar> prepare(const ScenarioConfig& c) {
  BaseComplex base = build_base(c.base);
  if (c.mode == "algebra") {
    auto model = build_algebra<Scalar>(c.model, c.config_dir, "/model");
    auto ambient = build_algebra<Scalar>(c.ambient, c.config_dir, "/ambient");
    auto action = build_action<Scalar>(c, model->dim(), ambient->dim());
    auto germ = build_algebra_germ<Scalar>(c, base, *model, *ambient);
    try {
      check_algebra_inputs(base, AlgebraGerm<Scalar>{model, ambient, germ, c.star_mode}, action, c.options);
    } catch (const std::logic_error& e) {
      throw ConfigError("", e.what());
    } catch (const std::runtime_error& e) {
      throw ConfigError("", e.what());
    }
    return {std::move(base), model, ambient, std::move(action), std::move(germ)};
  }
  auto action = build_action<Scalar>(c, c.hilbert_rank, c.hilbert_ambient);
  auto germ = build_frame_germ<Scalar>(c, base);
  try {
    check_frame_inputs(base, FrameGerm<Scalar>{c.hilbert_rank, c.hilbert_ambient, germ}, action, c.options);
  } catch (const std::logic_error& e) {
    throw ConfigError("", e.what());
  }
  return {std::move(base), nullptr, nullptr, std::move(action), std::move(germ)};
}

// ---------------------------------------------------------------------------
// Reports

std::string format_bool(bool b) { return b ? "true" : "false"; }

std::string format_finite_or_null(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

template <typename Scalar>
ScenarioOutcome run_typed(const ScenarioConfig& c) {
  const Prepared<Scalar> p = prepare<Scalar>(c);
  const bool algebra = c.mode == "algebra";
  const ExtensionResult<Scalar> r =
      algebra ? extend_algebra_subbundle(p.base, AlgebraGerm<Scalar>{p.model, p.ambient, p.germ, c.star_mode}, p.action,
                                         c.options)
              : extend_frame_bundle(p.base, FrameGerm<Scalar>{c.hilbert_rank, c.hilbert_ambient, p.germ}, p.action,
                                    c.options);

  const double restriction = restriction_defect(p.base, p.germ, r.maps_on_w);
  double max_unit = 0;
  for (const auto& d : r.diagnostics)
    if (d.in_w && algebra) max_unit = std::max(max_unit, d.unit_defect);
  const bool whole = static_cast<int>(p.base.z_vertices().size()) == p.base.num_vertices();

  ScenarioOutcome out;
  out.radius = r.radius;
  out.w_size = r.W.size();
  auto& inv = out.invariants;
  inv["restriction"] = restriction <= 1e-14;
  inv["equivariant"] = r.max_equivariance_defect <= c.options.equivariance_tol;
  inv["injective"] = r.min_injectivity_margin > 0;
  inv["radius_positive"] = r.radius > 0 || whole;
  if (algebra) {
    inv["multiplicative"] = r.max_defect <= std::max(c.options.rectify_tol, c.options.germ_tol);
    inv["unital"] = max_unit <= 1e-10;
    inv["bounds_finite"] = std::isfinite(r.bounds.K2) && std::isfinite(r.bounds.K0);
  } else {
    inv["isometric"] = r.max_defect <= 1e-12;
  }
  bool all = true;
  for (const auto& [_, ok] : inv) all = all && ok;
  if (r.degenerate && c.strict) {
    out.exit_code = kExitDegenerate;
    out.message = "degenerate neighborhood: W = Z";
  } else if (!all) {
    out.exit_code = kExitInvariantFailure;
    out.message = "invariant failure:";
    for (const auto& [name, ok] : inv)
      if (!ok) out.message += " " + name;
  } else {
    out.message = "ok";
  }

  std::ostringstream csv;
  write_diagnostics_csv(csv, r.diagnostics);
  out.diagnostics_csv = csv.str();

  std::ostringstream s;
  s << "{\n";
  s << "  \"format\": \"prolong-scenario-summary/1\",\n";
  s << "  \"name\": " << json_quote(c.name) << ",\n";
  s << "  \"mode\": \"" << c.mode << "\",\n";
  s << "  \"ground_field\": \"" << to_string(c.field) << "\",\n";
  s << "  \"num_vertices\": " << p.base.num_vertices() << ",\n";
  s << "  \"z_size\": " << p.base.z_vertices().size() << ",\n";
  s << "  \"w_size\": " << r.W.size() << ",\n";
  s << "  \"radius\": " << format_real(r.radius) << ",\n";
  s << "  \"degenerate\": " << format_bool(r.degenerate) << ",\n";
  s << "  \"strict\": " << format_bool(c.strict) << ",\n";
  if (algebra) {
    s << "  \"K2\": " << format_finite_or_null(r.bounds.K2) << ",\n";
    s << "  \"K0\": " << format_finite_or_null(r.bounds.K0) << ",\n";
    s << "  \"max_unit_defect\": " << format_real(max_unit) << ",\n";
  }
  s << "  \"restriction_defect\": " << format_finite_or_null(restriction) << ",\n";
  s << "  \"max_defect\": " << format_real(r.max_defect) << ",\n";
  s << "  \"max_equivariance_defect\": " << format_real(r.max_equivariance_defect) << ",\n";
  s << "  \"min_injectivity_margin\": " << format_finite_or_null(r.min_injectivity_margin) << ",\n";
  s << "  \"max_continuity_modulus\": " << format_real(r.max_continuity_modulus) << ",\n";
  s << "  \"max_iterations\": " << r.max_iterations << ",\n";
  s << "  \"W\": " << json(r.W).dump() << ",\n";
  s << "  \"invariants\": {";
  bool first = true;
  for (const auto& [name, ok] : inv) {
    s << (first ? "" : ", ") << json_quote(name) << ": " << format_bool(ok);
    first = false;
  }
  s << "},\n";
  s << "  \"exit_code\": " << out.exit_code << "\n";
  s << "}\n";
  out.summary_json = s.str();
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& text, const std::filesystem::path& config_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("byte " + std::to_string(e.byte), std::string("malformed document: ") + e.what());
  }
  const Node root{doc, ""};
  require_object(root, {"name", "mode", "ground_field", "base", "model", "ambient", "hilbert", "star_mode", "germ",
                        "action", "tolerances", "shepard", "threads", "preaverage_germ", "strict", "output"});
  ScenarioConfig c;
  c.config_dir = config_dir;
  if (!root.has("name")) root.fail("missing key 'name'");
  c.name = read_string(root.child("name"));
  if (root.has("mode")) c.mode = read_choice(root.child("mode"), {"algebra", "hilbert"});
  if (root.has("ground_field"))
    c.field = parse_ground_field(read_choice(root.child("ground_field"), {"real", "complex"}));
  if (!root.has("base")) root.fail("missing key 'base'");
  c.base = parse_base(root.child("base"));
  if (c.mode == "algebra") {
    if (!root.has("model")) root.fail("algebra mode needs 'model'");
    if (!root.has("ambient")) root.fail("algebra mode needs 'ambient'");
    c.model = parse_algebra_spec(root.child("model"));
    c.ambient = parse_algebra_spec(root.child("ambient"));
  } else {
    if (!root.has("hilbert")) root.fail("hilbert mode needs 'hilbert'");
    const Node h = root.child("hilbert");
    require_object(h, {"rank", "ambient_dim"});
    if (h.has("rank")) c.hilbert_rank = read_int_at_least(h.child("rank"), 1);
    if (h.has("ambient_dim")) c.hilbert_ambient = read_int_at_least(h.child("ambient_dim"), 1);
    if (c.hilbert_ambient < c.hilbert_rank) h.fail("rank exceeds ambient_dim");
  }
  if (root.has("star_mode")) c.star_mode = read_bool(root.child("star_mode"));
  if (!root.has("germ")) root.fail("missing key 'germ'");
  c.germ = parse_germ(root.child("germ"));
  if (root.has("action")) c.action = parse_action(root.child("action"));
  if (root.has("tolerances")) parse_tolerances(root.child("tolerances"), c.options);
  if (root.has("shepard")) {
    const Node s = root.child("shepard");
    require_object(s, {"power", "k"});
    if (s.has("power")) c.options.shepard_power = read_positive(s.child("power"));
    if (s.has("k")) c.options.shepard_k = read_int_at_least(s.child("k"), 1);
  }
  if (root.has("threads")) c.options.threads = read_int_at_least(root.child("threads"), 1);
  if (root.has("preaverage_germ")) c.options.preaverage_germ = read_bool(root.child("preaverage_germ"));
  if (root.has("strict")) c.strict = read_bool(root.child("strict"));
  c.diagnostics_path = c.name + ".diagnostics.csv";
  c.summary_path = c.name + ".summary.json";
  if (root.has("output")) {
    const Node o = root.child("output");
    require_object(o, {"diagnostics", "summary"});
    if (o.has("diagnostics")) c.diagnostics_path = read_string(o.child("diagnostics"));
    if (o.has("summary")) c.summary_path = read_string(o.child("summary"));
  }
  return c;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config(buf.str(), path.parent_path());
}

void validate_scenario(const ScenarioConfig& config) {
  if (config.field == GroundField::Real)
    prepare<double>(config);
  else
    prepare<std::complex<double>>(config);
}

ScenarioOutcome run_scenario(const ScenarioConfig& config) {
  try {
    return config.field == GroundField::Real ? run_typed<double>(config) : run_typed<std::complex<double>>(config);
  } catch (const ConfigError& e) {
    ScenarioOutcome out;
    out.exit_code = kExitConfigError;
    out.message = e.what();
    return out;
  }
}

void write_scenario_outputs(const ScenarioConfig& config, const ScenarioOutcome& outcome,
                            const std::filesystem::path& out_dir) {
  if (outcome.exit_code == kExitConfigError) return;
  auto write = [&](const std::string& rel, const std::string& text) {
    const auto path = out_dir / rel;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
  };
  write(config.diagnostics_path, outcome.diagnostics_csv);
  write(config.summary_path, outcome.summary_json);
}

}  // namespace prolong
