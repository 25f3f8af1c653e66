#include "prolong/io.hpp"

#include "json.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace prolong {

using nlohmann::json;

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17e", value);
  return buf;
}

std::string json_quote(const std::string& text) { return json(text).dump(); }

std::string to_string(GroundField field) { return field == GroundField::Real ? "real" : "complex"; }

GroundField parse_ground_field(const std::string& text) {
  if (text == "real") return GroundField::Real;
  if (text == "complex") return GroundField::Complex;
  throw std::invalid_argument("unknown ground field '" + text + "'");
}

namespace {

template <typename Scalar>
std::string format_scalar(const Scalar& s) {
  if constexpr (is_complex_v<Scalar>) {
    return "[" + format_real(s.real()) + ", " + format_real(s.imag()) + "]";
  } else {
    return format_real(s);
  }
}

template <typename Range>
std::string format_list(const Range& values) {
  std::string out = "[";
  bool first = true;
  for (const auto& v : values) {
    if (!first) out += ", ";
    out += format_scalar(v);
    first = false;
  }
  return out + "]";
}

template <typename Scalar>
std::vector<Scalar> row_major(const Matrix<Scalar>& m) {
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

template <typename Scalar>
Scalar read_scalar(const json& j) {
  if constexpr (is_complex_v<Scalar>) {
    if (j.is_number()) return Scalar(j.get<double>(), 0.0);
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
      throw std::invalid_argument("expected a complex scalar [re, im]");
    return Scalar(j[0].get<double>(), j[1].get<double>());
  } else {
    if (!j.is_number()) throw std::invalid_argument("expected a real scalar");
    return j.get<double>();
  }
}

template <typename Scalar>
std::vector<Scalar> read_list(const json& j, std::size_t expected, const char* what) {
  if (!j.is_array() || j.size() != expected)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) + " scalars");
  std::vector<Scalar> out;
  out.reserve(expected);
  for (const auto& x : j) out.push_back(read_scalar<Scalar>(x));
  return out;
}

template <typename Scalar>
Matrix<Scalar> read_matrix(const json& j, Index rows, Index cols, const char* what) {
  const auto flat = read_list<Scalar>(j, static_cast<std::size_t>(rows * cols), what);
  Matrix<Scalar> m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  return m;
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed document: ") + e.what());
  }
}

template <typename Scalar>
void require_field(const json& doc) {
  if (!doc.contains("ground_field") || !doc["ground_field"].is_string())
    throw std::invalid_argument("document has no ground_field");
  if (parse_ground_field(doc["ground_field"].get<std::string>()) != ground_field_of<Scalar>())
    throw std::invalid_argument("document ground field does not match the requested scalar type");
}

}  // namespace

template <typename Scalar>
std::string serialize_matrix(const Matrix<Scalar>& m) {
  return format_list(row_major(m));
}

GroundField peek_ground_field(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.contains("ground_field") || !doc["ground_field"].is_string())
    throw std::invalid_argument("document has no ground_field");
  return parse_ground_field(doc["ground_field"].get<std::string>());
}

template <typename Scalar>
std::string serialize_algebra(const Algebra<Scalar>& algebra) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": \"prolong-algebra/1\",\n";
  out << "  \"label\": " << json_quote(algebra.label()) << ",\n";
  out << "  \"ground_field\": \"" << to_string(ground_field_of<Scalar>()) << "\",\n";
  out << "  \"dim\": " << algebra.dim() << ",\n";
  out << "  \"structure_constants\": " << format_list(algebra.flat_structure_constants()) << ",\n";
  out << "  \"unit\": " << format_list(std::vector<Scalar>(algebra.unit().data(), algebra.unit().data() + algebra.dim()))
      << ",\n";
  if (algebra.involution()) {
    out << "  \"involution\": {\"conjugate_linear\": " << (algebra.involution()->conjugate_linear ? "true" : "false")
        << ", \"matrix\": " << serialize_matrix(algebra.involution()->matrix) << "},\n";
  } else {
    out << "  \"involution\": null,\n";
  }
  out << "  \"inner_product\": " << serialize_matrix(algebra.inner_product()) << "\n";
  out << "}\n";
  return out.str();
}

template <typename Scalar>
Algebra<Scalar> parse_algebra(const std::string& text) {
  const json doc = parse_document(text);
  require_field<Scalar>(doc);
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) throw std::invalid_argument("algebra document: missing dim");
  const Index dim = doc["dim"].get<Index>();
  if (dim < 1) throw std::invalid_argument("algebra document: dim must be positive");
  const auto n = static_cast<std::size_t>(dim);
  const auto flat = read_list<Scalar>(doc.value("structure_constants", json()), n * n * n, "structure_constants");
  const auto unit_list = read_list<Scalar>(doc.value("unit", json()), n, "unit");
  Vector<Scalar> unit = Eigen::Map<const Vector<Scalar>>(unit_list.data(), dim);

  std::optional<typename Algebra<Scalar>::Involution> involution;
  if (doc.contains("involution") && !doc["involution"].is_null()) {
    const auto& inv = doc["involution"];
    involution = typename Algebra<Scalar>::Involution{read_matrix<Scalar>(inv.value("matrix", json()), dim, dim, "involution"),
                                                     inv.value("conjugate_linear", false)};
  }
  std::optional<Matrix<Scalar>> gram;
  if (doc.contains("inner_product") && !doc["inner_product"].is_null())
    gram = read_matrix<Scalar>(doc["inner_product"], dim, dim, "inner_product");
  return Algebra<Scalar>::from_structure_constants(dim, flat, std::move(unit), std::move(involution), std::move(gram),
                                                   doc.value("label", std::string("custom")));
}

template <typename Scalar>
std::string serialize_group_action(const GroupAction<Scalar>& action) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": \"prolong-group-action/1\",\n";
  out << "  \"ground_field\": \"" << to_string(ground_field_of<Scalar>()) << "\",\n";
  out << "  \"table\": " << json(action.table()).dump() << ",\n";
  out << "  \"base_permutations\": " << json(action.base_permutations()).dump() << ",\n";
  out << "  \"source_dim\": " << action.source_dim() << ",\n";
  out << "  \"target_dim\": " << action.target_dim() << ",\n";
  auto list = [&](auto getter) {
    std::string s = "[";
    for (int g = 0; g < action.order(); ++g) {
      if (g) s += ",\n    ";
      s += serialize_matrix(getter(g));
    }
    return s + "]";
  };
  out << "  \"source_actions\": " << list([&](int g) { return action.source_action(g); }) << ",\n";
  out << "  \"target_actions\": " << list([&](int g) { return action.target_action(g); }) << "\n";
  out << "}\n";
  return out.str();
}

template <typename Scalar>
GroupAction<Scalar> parse_group_action(const std::string& text) {
  const json doc = parse_document(text);
  require_field<Scalar>(doc);
  try {
    const auto table = doc.at("table").get<std::vector<std::vector<int>>>();
    const auto perms = doc.at("base_permutations").get<std::vector<std::vector<int>>>();
    const Index sd = doc.at("source_dim").get<Index>();
    const Index td = doc.at("target_dim").get<Index>();
    auto read_all = [&](const char* key, Index d) {
      std::vector<Matrix<Scalar>> out;
      for (const auto& m : doc.at(key)) out.push_back(read_matrix<Scalar>(m, d, d, key));
      return out;
    };
    return GroupAction<Scalar>(table, perms, read_all("source_actions", sd), read_all("target_actions", td));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("group action document: ") + e.what());
  }
}

template <typename Scalar>
std::string serialize_rectify_result(const RectifyResult<Scalar>& result) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"status\": \"" << to_string(result.status) << "\",\n";
  out << "  \"iterations\": " << result.iterations << ",\n";
  std::vector<double> trace(result.defect_trace.begin(), result.defect_trace.end());
  out << "  \"defect_trace\": " << format_list(trace) << ",\n";
  out << "  \"map\": {\"rows\": " << result.map.matrix.rows() << ", \"cols\": " << result.map.matrix.cols()
      << ", \"entries\": " << serialize_matrix(result.map.matrix) << "}\n";
  out << "}\n";
  return out.str();
}

void write_diagnostics_csv(std::ostream& out, const std::vector<VertexDiagnostics>& rows) {
  out << "vertex,distance_to_z,in_z,in_w,passed,status,defect,unit_defect,equivariance_defect,injectivity_margin,"
         "iterations\n";
  for (const auto& d : rows) {
    out << d.vertex << ',' << format_real(d.distance_to_z) << ',' << int(d.in_z) << ',' << int(d.in_w) << ','
        << int(d.passed) << ',' << d.status << ',' << format_real(d.defect) << ',' << format_real(d.unit_defect) << ','
        << format_real(d.equivariance_defect) << ',' << format_real(d.injectivity_margin) << ',' << d.iterations
        << '\n';
  }
}

#define PROLONG_INSTANTIATE_IO(S)                                               \
  template std::string serialize_matrix<S>(const Matrix<S>&);                  \
  template std::string serialize_algebra<S>(const Algebra<S>&);                \
  template Algebra<S> parse_algebra<S>(const std::string&);                    \
  template std::string serialize_group_action<S>(const GroupAction<S>&);       \
  template GroupAction<S> parse_group_action<S>(const std::string&);           \
  template std::string serialize_rectify_result<S>(const RectifyResult<S>&);

PROLONG_INSTANTIATE_IO(double)
PROLONG_INSTANTIATE_IO(std::complex<double>)

#undef PROLONG_INSTANTIATE_IO

}  // namespace prolong
