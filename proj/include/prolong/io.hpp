#ifndef PROLONG_IO_HPP
#define PROLONG_IO_HPP

#include "prolong/bundle.hpp"

#include <iosfwd>
#include <string>

namespace prolong {

/// "%.17e": 18 significant digits, round-trips every double.
std::string format_real(double value);

/// JSON string literal with escaping.
std::string json_quote(const std::string& text);

std::string to_string(GroundField field);
GroundField parse_ground_field(const std::string& text);

/// Algebra document: ground field, dimension, flat (i, j, k) row-major
/// structure constants, unit, optional involution, inner product. Complex
/// scalars are written as [re, im].
template <typename Scalar>
std::string serialize_algebra(const Algebra<Scalar>& algebra);

/// Throws std::invalid_argument on malformed documents or a ground field
/// that differs from Scalar.
template <typename Scalar>
Algebra<Scalar> parse_algebra(const std::string& text);

/// Reads only the ground field of an algebra or group-action document.
GroundField peek_ground_field(const std::string& text);

template <typename Scalar>
std::string serialize_group_action(const GroupAction<Scalar>& action);

template <typename Scalar>
GroupAction<Scalar> parse_group_action(const std::string& text);

/// status, iterations, defect_trace and the final map matrix.
template <typename Scalar>
std::string serialize_rectify_result(const RectifyResult<Scalar>& result);

/// Per-vertex diagnostics table, one row per vertex.
void write_diagnostics_csv(std::ostream& out, const std::vector<VertexDiagnostics>& rows);

/// Row-major matrix as a JSON array of scalars.
template <typename Scalar>
std::string serialize_matrix(const Matrix<Scalar>& m);

}  // namespace prolong

#endif  // PROLONG_IO_HPP
