#include "jetext/batch.hpp"

#include <stdexcept>

namespace jetext {

std::vector<GradientValue> evaluate_batch(const ConvexExtension& ext, std::span<const Point> points,
                                          Exec exec) {
  std::vector<GradientValue> out(points.size());
  detail::for_each_index(points.size(), exec, [&](std::size_t i) {
    ExtensionValue e = ext.eval_F(points[i]);
    out[i] = GradientValue{e.value, std::move(e.gradient)};
  });
  return out;
}

std::vector<GradientValue> evaluate_batch(const WhitneyExtension& ext, std::span<const Point> points,
                                          Exec exec) {
  std::vector<GradientValue> out(points.size());
  detail::for_each_index(points.size(), exec, [&](std::size_t i) { out[i] = ext.eval_G(points[i]); });
  return out;
}

std::vector<Point> lattice(const Point& lo, const Point& hi, std::size_t res) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("lattice: bad box");
  if (res < 2) throw std::invalid_argument("lattice: need at least 2 nodes per axis");
  const std::size_t n = lo.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= res;
  std::vector<Point> nodes(total, Point(n));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = n; k-- > 0;) {
      const std::size_t i = rem % res;
      rem /= res;
      const double t = static_cast<double>(i) / static_cast<double>(res - 1);
      // Endpoints are hit exactly.
      nodes[idx][k] = i + 1 == res ? hi[k] : lo[k] + t * (hi[k] - lo[k]);
    }
  }
  return nodes;
}

}  // namespace jetext
