#pragma once

// 1-Taylor fields (finite 1-jets) and the pairwise constants that govern
// their C^{1,1} extendability.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jetext/exec.hpp"
#include "jetext/linalg.hpp"

namespace jetext {

/// One prescribed jet: location, value and gradient.
struct Site {
  Point s;
  double alpha = 0.0;
  Point v;
};

/// Raised when a field fails validation. Carries the offending site index
/// when one can be named.
class FieldError : public std::invalid_argument {
 public:
  FieldError(const std::string& what, std::optional<std::size_t> site)
      : std::invalid_argument(what), site_(site) {}
  std::optional<std::size_t> site() const { return site_; }

 private:
  std::optional<std::size_t> site_;
};

/// Finite 1-Taylor field on pairwise-distinct sites of R^n. Immutable.
class TaylorField1 {
 public:
  /// Validates dimensions, finiteness and site separation; throws FieldError.
  TaylorField1(std::size_t dim, std::vector<Site> sites);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return sites_.size(); }
  const Site& operator[](std::size_t i) const { return sites_[i]; }
  const std::vector<Site>& sites() const { return sites_; }

  friend bool operator==(const TaylorField1&, const TaylorField1&) = default;

 private:
  std::size_t dim_;
  std::vector<Site> sites_;
};

/// Two sites closer than this (absolute, after scaling by 1 + max |coord|)
/// are treated as coincident.
inline constexpr double kDuplicateSiteTolerance = 1e-12;

/// An ordered pair (first, second) of site indices.
struct SitePair {
  std::size_t first = 0;
  std::size_t second = 0;
};

/// Result of the smallest-modulus search for a convex C^{1,1} extension.
/// `m_star` is empty when no modulus works; `witness` then names an ordered
/// pair violating the convex compatibility inequality.
struct ConvexityModulus {
  std::optional<double> m_star;
  std::optional<SitePair> witness;
  /// Signed gap alpha(s2) - alpha(s1) - <v(s1), s2 - s1> at the witness.
  double witness_gap = 0.0;

  bool feasible() const { return m_star.has_value(); }
};

struct FieldConstants {
  double K1 = 0.0;
  double K2 = 0.0;
  double gamma1 = 0.0;
  ConvexityModulus convexity;
};

struct LemmaBoundsReport {
  bool K2_bound_ok = false;  // K2 <= gamma1
  bool K1_bound_ok = false;  // 4 K1 - 2 K2 <= gamma1
  double K2_slack = 0.0;     // gamma1 - K2
  double K1_slack = 0.0;     // gamma1 - (4 K1 - 2 K2)
};

/// max over ordered pairs of |alpha(s2) - alpha(s1) - <v(s1), s2 - s1>| / |s1 - s2|^2.
double compute_K1(const TaylorField1& field, Exec exec = Exec::kParallel);

/// max over pairs of |v(s1) - v(s2)| / |s1 - s2|.
double compute_K2(const TaylorField1& field, Exec exec = Exec::kParallel);

/// Le Gruyer's constant: max over pairs of sqrt(A^2 + |B|^2) + |A| with
/// A = [2(alpha1 - alpha2) + <v1 + v2, s2 - s1>] / |s1 - s2|^2 and
/// B = (v1 - v2) / |s1 - s2|.
double compute_gamma1(const TaylorField1& field, Exec exec = Exec::kParallel);

/// Smallest M such that
///   alpha(s2) >= alpha(s1) + <v(s1), s2 - s1> + |v(s1) - v(s2)|^2 / (2M)
/// for every ordered pair. Zero means every M > 0 works (affine trace).
///
/// Gaps and gradient differences within a few ulps of their operands are
/// rounded to zero before the feasibility test, so exact affine traces are
/// not rejected over round-off.
ConvexityModulus smallest_convexity_modulus(const TaylorField1& field,
                                            Exec exec = Exec::kParallel);

FieldConstants compute_constants(const TaylorField1& field, Exec exec = Exec::kParallel);

/// Self-check of K2 <= gamma1 and 4 K1 - 2 K2 <= gamma1 on the computed
/// constants, with 1e-12 relative slack on each comparison.
LemmaBoundsReport lemma_bounds_report(const TaylorField1& field, Exec exec = Exec::kParallel);
LemmaBoundsReport lemma_bounds_report(const FieldConstants& constants);

}  // namespace jetext
