#pragma once

// Batch evaluation over many query points. Results are written by index,
// so row order matches input order on both execution paths.

#include <span>
#include <vector>

#include "jetext/convex_extension.hpp"
#include "jetext/exec.hpp"
#include "jetext/whitney_extension.hpp"

namespace jetext {

std::vector<GradientValue> evaluate_batch(const ConvexExtension& ext, std::span<const Point> points,
                                          Exec exec = Exec::kParallel);

std::vector<GradientValue> evaluate_batch(const WhitneyExtension& ext, std::span<const Point> points,
                                          Exec exec = Exec::kParallel);

/// Lattice nodes of [lo, hi] with `res` nodes per axis; the first axis
/// varies slowest. res = 2 yields the corners.
std::vector<Point> lattice(const Point& lo, const Point& hi, std::size_t res);

}  // namespace jetext
