#pragma once

// Convex C^{1,1} extension of a 1-Taylor field by sup-inf convolution of
// the smallest convex extension f(x) = max_s { alpha(s) + <v(s), x - s> }.
//
// The inf-convolution of the max-of-affine sup-convolution is evaluated
// exactly through its simplex dual: with eps in (0, 1/M),
//
//   (f^eps)_eps(x) = max_{lambda in simplex} <c, lambda> - (eps/2)|V lambda|^2,
//   c_s = alpha(s) + <v(s), x - s> + (eps/2)|v(s)|^2,
//
// whose maximizer gives the gradient V lambda* and the inner minimizer
// z = x - eps V lambda*.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "jetext/field.hpp"
#include "jetext/simplex_qp.hpp"

namespace jetext {

/// Raised when a convex extension is requested for data that admits none
/// (or for a modulus below the smallest admissible one).
class InfeasibleFieldError : public std::invalid_argument {
 public:
  InfeasibleFieldError(const std::string& what, std::optional<SitePair> witness)
      : std::invalid_argument(what), witness_(witness) {}
  std::optional<SitePair> witness() const { return witness_; }

 private:
  std::optional<SitePair> witness_;
};

struct LasryLionsEvaluation {
  Point x;
  double value = 0.0;
  Point gradient;
  Point z_bar;
  std::vector<double> weights;
};

struct ExtensionValue {
  double value = 0.0;
  Point gradient;
  /// Lipschitz bound on the gradient that holds at the evaluation eps.
  double lip_bound = 0.0;
};

inline constexpr double kDefaultEpsFraction = 1.0 - 1e-6;

/// f(x): the smallest convex extension (max of the affine jets).
double eval_f(const TaylorField1& field, std::span<const double> x);

/// f^eps(x) = max_s { alpha(s) + <v(s), x - s> + (eps/2)|v(s)|^2 }.
double eval_f_supconv(const TaylorField1& field, double eps, std::span<const double> x);

/// q^eps for q(x) = alpha + <v, x - s> + (M/2)|x - s|^2. Requires eps M < 1.
double quad_supconv(double alpha, std::span<const double> v, std::span<const double> s, double M,
                    double eps, std::span<const double> x);

/// q_eps for the same quadratic; any eps > 0.
double quad_infconv(double alpha, std::span<const double> v, std::span<const double> s, double M,
                    double eps, std::span<const double> x);

/// Evaluator for F = lim_{eps -> 1/M} (f^eps)_eps, approximated at
/// eps = eps_fraction / M. Values at finite eps bound F from below.
class ConvexExtension {
 public:
  /// Uses the smallest admissible modulus. Throws InfeasibleFieldError for
  /// fields without a convex C^{1,1} extension.
  explicit ConvexExtension(TaylorField1 field, double eps_fraction = kDefaultEpsFraction);

  /// Uses an explicit modulus, which must be >= the smallest admissible one.
  ConvexExtension(TaylorField1 field, double modulus, double eps_fraction);

  const TaylorField1& field() const { return field_; }
  double modulus() const { return modulus_; }
  double eps_fraction() const { return eps_fraction_; }
  /// eps = eps_fraction / modulus; zero on the affine path.
  double eps() const { return affine_ ? 0.0 : eps_fraction_ / modulus_; }
  /// Smallest admissible modulus of the field.
  double smallest_modulus() const { return m_star_; }
  /// True when every jet lies on one affine function; evaluation then
  /// skips the convolution entirely.
  bool is_affine() const { return affine_; }

  /// (f^eps)_eps at the configured eps.
  LasryLionsEvaluation eval_lasry_lions(std::span<const double> x) const;
  /// (f^eps)_eps at an arbitrary eps in (0, 1/M).
  LasryLionsEvaluation eval_lasry_lions_at(std::span<const double> x, double eps) const;

  ExtensionValue eval_F(std::span<const double> x) const;

 private:
  void init(std::optional<double> modulus);

  TaylorField1 field_;
  double modulus_ = 0.0;
  double eps_fraction_ = kDefaultEpsFraction;
  double m_star_ = 0.0;
  bool affine_ = false;
  std::vector<double> columns_;
};

}  // namespace jetext
