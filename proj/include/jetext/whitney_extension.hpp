#pragma once

// General C^{1,1} extension of a 1-Taylor field by tilting:
//
//   G(x) = F(x) - (mu/2)|x|^2,
//
// where F is the convex extension of the tilted field
// (alpha(s) + (mu/2)|s|^2, v(s) + mu s) and
//
//   mu = 2 K1 + K2 + sqrt((2 K1 + K2)^2 + K2^2)
//
// minimizes max{mu, (mu + K2)^2 / (mu - 2 K1) - mu}. The resulting
// Lip(grad G) is within (5 + sqrt 29)/2 of the smallest possible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

#include "jetext/convex_extension.hpp"
#include "jetext/exec.hpp"
#include "jetext/field.hpp"

namespace jetext {

/// (5 + sqrt 29) / 2.
inline const double kAlmostMinimalityFactor = (5.0 + std::sqrt(29.0)) / 2.0;

/// Closed-form minimizer over mu > 2 K1 of max{mu, (mu + K2)^2/(mu - 2 K1) - mu}.
double compute_mu_bar(double K1, double K2);

/// The tilted convex modulus (mu + K2)^2 / (mu - 2 K1). Requires mu > 2 K1.
double tilted_modulus(double mu, double K1, double K2);

/// max{mu, tilted_modulus(mu, K1, K2) - mu}: the Lip(grad G) budget for a given mu.
double tilt_budget(double mu, double K1, double K2);

/// (alpha(s) + (mu/2)|s|^2, v(s) + mu s) on the same sites.
TaylorField1 tilt_field(const TaylorField1& field, double mu);

struct GradientValue {
  double value = 0.0;
  Point gradient;
};

class WhitneyExtension {
 public:
  /// Builds the extension. `modulus` overrides the tilted convex modulus
  /// (default: (mu + K2)^2 / (mu - 2 K1)). Throws std::logic_error if the
  /// tilted field fails the convex compatibility check at that modulus.
  static WhitneyExtension build(TaylorField1 field, double eps_fraction = kDefaultEpsFraction,
                                std::optional<double> modulus = std::nullopt);

  const TaylorField1& base_field() const { return base_; }
  const TaylorField1& tilted_field() const { return tilted_; }
  double K1() const { return K1_; }
  double K2() const { return K2_; }
  double mu_bar() const { return mu_bar_; }
  /// Modulus of the tilted convex extension; zero on the affine path.
  double modulus() const { return modulus_; }
  double eps_fraction() const { return eps_fraction_; }
  bool is_affine() const { return !convex_.has_value(); }
  const ConvexExtension& convex() const { return *convex_; }

  /// Semiconvexity constant of G (mu).
  double semiconvexity_bound() const { return mu_bar_; }
  /// Semiconcavity constant of G at the evaluation eps: M / eps_fraction - mu.
  double semiconcavity_bound() const;
  /// Lip(grad G) budget at the evaluation eps.
  double lipschitz_budget() const { return std::max(semiconvexity_bound(), semiconcavity_bound()); }

  GradientValue eval_G(std::span<const double> x) const;

 private:
  WhitneyExtension(TaylorField1 base, TaylorField1 tilted) : base_(std::move(base)), tilted_(std::move(tilted)) {}

  TaylorField1 base_;
  TaylorField1 tilted_;
  double K1_ = 0.0;
  double K2_ = 0.0;
  double mu_bar_ = 0.0;
  double modulus_ = 0.0;
  double eps_fraction_ = kDefaultEpsFraction;
  std::optional<ConvexExtension> convex_;
};

/// Axis-aligned sampling box.
struct Box {
  Point lo;
  Point hi;
};

struct CertifyOptions {
  std::size_t n_samples = 10000;
  std::uint64_t seed = 0;
  Box box;
  Exec exec = Exec::kParallel;
};

/// Sampled evidence for the interpolation, Lipschitz and almost-minimality
/// guarantees. All sampled constants are lower estimates of the true
/// suprema, so every pass criterion is one-sided.
struct CertificationReport {
  /// max over sites of |G(s) - alpha(s)| / (1 + |alpha(s)|).
  double interp_value_resid = 0.0;
  /// max over sites of |grad G(s) - v(s)| / (1 + |v(s)|).
  double interp_grad_resid = 0.0;
  double lip_grad_sampled = 0.0;
  double gamma1 = 0.0;
  /// lip_grad_sampled / gamma1; zero when gamma1 is zero.
  double minimality_ratio = 0.0;
  double semiconvex_sampled = 0.0;
  double semiconcave_sampled = 0.0;
  double mu_bar = 0.0;
  double semiconcave_bound = 0.0;
  double lipschitz_budget = 0.0;
  std::size_t n_samples = 0;

  bool interp_ok = false;
  bool ratio_ok = false;
  bool lipschitz_ok = false;
  bool semiconvex_ok = false;
  bool semiconcave_ok = false;
  bool pass = false;
};

/// Interpolation tolerances: |G(s) - alpha| <= 1e-7 (1 + |alpha|) and
/// |grad G(s) - v| <= 1e-6 (1 + |v|).
inline constexpr double kInterpValueTol = 1e-7;
inline constexpr double kInterpGradTol = 1e-6;
/// Relative slack on the sampled bounds.
inline constexpr double kSampledBoundSlack = 1e-6;

/// Throws std::invalid_argument if the box is malformed or misses a site.
CertificationReport certify(const WhitneyExtension& ext, const CertifyOptions& options);

}  // namespace jetext
