#include "jetext/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace jetext {

using nlohmann::json;

namespace {

Point read_vector(const json& node, const char* key, std::size_t dim, std::size_t site) {
  const std::string where = "site " + std::to_string(site) + ": ";
  if (!node.contains(key)) throw FieldError(where + "missing \"" + key + "\"", site);
  const json& arr = node.at(key);
  if (!arr.is_array()) throw FieldError(where + "\"" + key + "\" must be an array", site);
  if (arr.size() != dim)
    throw FieldError(where + "\"" + key + "\" must have " + std::to_string(dim) + " entries", site);
  Point p(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    if (!arr[k].is_number())
      throw FieldError(where + "\"" + key + "\"[" + std::to_string(k) + "] is not a number", site);
    p[k] = arr[k].get<double>();
  }
  return p;
}

}  // namespace

TaylorField1 parse_field_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FieldError(std::string("invalid JSON: ") + e.what(), std::nullopt);
  }
  if (!doc.is_object()) throw FieldError("field document must be a JSON object", std::nullopt);
  if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long long>() <= 0)
    throw FieldError("\"dim\" must be a positive integer", std::nullopt);
  const auto dim = static_cast<std::size_t>(doc["dim"].get<long long>());
  if (!doc.contains("sites") || !doc["sites"].is_array())
    throw FieldError("\"sites\" must be an array", std::nullopt);

  std::vector<Site> sites;
  const json& arr = doc["sites"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& node = arr[i];
    if (!node.is_object()) throw FieldError("site " + std::to_string(i) + ": must be an object", i);
    Site site;
    site.s = read_vector(node, "s", dim, i);
    site.v = read_vector(node, "v", dim, i);
    if (!node.contains("alpha") || !node["alpha"].is_number())
      throw FieldError("site " + std::to_string(i) + ": \"alpha\" must be a number", i);
    site.alpha = node["alpha"].get<double>();
    sites.push_back(std::move(site));
  }
  return TaylorField1(dim, std::move(sites));
}

TaylorField1 load_field_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FieldError("cannot open field document " + path, std::nullopt);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_field_document(buf.str());
}

std::string to_field_document(const TaylorField1& field) {
  json doc;
  doc["dim"] = field.dim();
  doc["sites"] = json::array();
  for (const Site& site : field.sites())
    doc["sites"].push_back({{"s", site.s}, {"alpha", site.alpha}, {"v", site.v}});
  return doc.dump(2);
}

std::vector<Point> parse_points_csv(std::istream& in, std::size_t dim) {
  std::vector<Point> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Point p;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      field = first == std::string::npos ? std::string() : field.substr(first, last - first + 1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
        throw PointsError("points line " + std::to_string(lineno) + ": bad number \"" + field + "\"", lineno);
      p.push_back(value);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (p.size() != dim)
      throw PointsError("points line " + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                            " columns, got " + std::to_string(p.size()),
                        lineno);
    points.push_back(std::move(p));
  }
  return points;
}

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_evaluation_csv(std::ostream& out, std::size_t dim, std::span<const Point> points,
                          std::span<const GradientValue> values) {
  for (std::size_t k = 0; k < dim; ++k) out << 'x' << k << ',';
  out << "value";
  for (std::size_t k = 0; k < dim; ++k) out << ",g" << k;
  out << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (double x : points[i]) out << format_real(x) << ',';
    out << format_real(values[i].value);
    for (double g : values[i].gradient) out << ',' << format_real(g);
    out << '\n';
  }
}

}  // namespace jetext
