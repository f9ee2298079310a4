#pragma once

// Field documents (JSON) and point/evaluation tables (CSV).
//
// Field document schema:
//   {"dim": n, "sites": [{"s": [n reals], "alpha": real, "v": [n reals]}, ...]}
//
// Points are headerless CSV with `dim` columns per line. Evaluation tables
// carry a header x0..x{n-1},value,g0..g{n-1}.

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jetext/field.hpp"
#include "jetext/whitney_extension.hpp"

namespace jetext {

/// Parses a field document. Throws FieldError naming the offending site.
TaylorField1 parse_field_document(std::string_view text);
TaylorField1 load_field_document(const std::string& path);

/// Serializes with shortest round-trip decimal reals.
std::string to_field_document(const TaylorField1& field);

class PointsError : public std::invalid_argument {
 public:
  PointsError(const std::string& what, std::size_t line) : std::invalid_argument(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Blank lines are skipped. Throws PointsError with the 1-based line number.
std::vector<Point> parse_points_csv(std::istream& in, std::size_t dim);

/// Shortest decimal string that reads back to the same double.
std::string format_real(double x);

void write_evaluation_csv(std::ostream& out, std::size_t dim, std::span<const Point> points,
                          std::span<const GradientValue> values);

}  // namespace jetext
