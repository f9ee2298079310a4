#include "jetext/convex_extension.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace jetext {

double eval_f(const TaylorField1& field, std::span<const double> x) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Site& site : field.sites())
    best = std::max(best, site.alpha + dot_diff(site.v, x, site.s));
  return best;
}

double eval_f_supconv(const TaylorField1& field, double eps, std::span<const double> x) {
  if (!(eps > 0.0)) throw std::invalid_argument("sup-convolution: eps must be positive");
  double best = -std::numeric_limits<double>::infinity();
  for (const Site& site : field.sites())
    best = std::max(best, site.alpha + dot_diff(site.v, x, site.s) + 0.5 * eps * squared_norm(site.v));
  return best;
}

double quad_supconv(double alpha, std::span<const double> v, std::span<const double> s, double M,
                    double eps, std::span<const double> x) {
  if (!(eps > 0.0) || !(M > 0.0) || !(eps * M < 1.0))
    throw std::invalid_argument("quad_supconv: requires M > 0 and 0 < eps < 1/M");
  const double body = 0.5 * M * squared_distance(x, s) + dot_diff(v, x, s) + 0.5 * eps * squared_norm(v);
  return alpha + body / (1.0 - eps * M);
}

double quad_infconv(double alpha, std::span<const double> v, std::span<const double> s, double M,
                    double eps, std::span<const double> x) {
  if (!(eps > 0.0) || !(M > 0.0))
    throw std::invalid_argument("quad_infconv: requires M > 0 and eps > 0");
  const double body = 0.5 * M * squared_distance(x, s) + dot_diff(v, x, s) - 0.5 * eps * squared_norm(v);
  return alpha + body / (1.0 + eps * M);
}

ConvexExtension::ConvexExtension(TaylorField1 field, double eps_fraction)
    : field_(std::move(field)), eps_fraction_(eps_fraction) {
  init(std::nullopt);
}

ConvexExtension::ConvexExtension(TaylorField1 field, double modulus, double eps_fraction)
    : field_(std::move(field)), eps_fraction_(eps_fraction) {
  init(modulus);
}

void ConvexExtension::init(std::optional<double> modulus) {
  if (!(eps_fraction_ > 0.0 && eps_fraction_ < 1.0))
    throw std::invalid_argument("eps_fraction must lie in (0, 1)");
  const ConvexityModulus cm = smallest_convexity_modulus(field_);
  if (!cm.feasible()) {
    const SitePair w = *cm.witness;
    throw InfeasibleFieldError("field admits no convex C^{1,1} extension: sites " +
                                   std::to_string(w.first) + " -> " + std::to_string(w.second) +
                                   " violate the convex compatibility inequality (gap " +
                                   std::to_string(cm.witness_gap) + ")",
                               w);
  }
  m_star_ = *cm.m_star;
  if (modulus) {
    if (!(*modulus > 0.0) || !std::isfinite(*modulus))
      throw std::invalid_argument("modulus must be positive and finite");
    if (*modulus < m_star_ * (1.0 - 1e-12))
      throw InfeasibleFieldError("modulus " + std::to_string(*modulus) +
                                     " is below the smallest admissible modulus " +
                                     std::to_string(m_star_),
                                 std::nullopt);
  }
  affine_ = m_star_ == 0.0;
  modulus_ = modulus.value_or(m_star_);

  const std::size_t n = field_.dim();
  columns_.resize(field_.size() * n);
  for (std::size_t i = 0; i < field_.size(); ++i)
    std::copy(field_[i].v.begin(), field_[i].v.end(), columns_.begin() + static_cast<std::ptrdiff_t>(i * n));
}

LasryLionsEvaluation ConvexExtension::eval_lasry_lions(std::span<const double> x) const {
  return eval_lasry_lions_at(x, eps());
}

LasryLionsEvaluation ConvexExtension::eval_lasry_lions_at(std::span<const double> x,
                                                          double eps) const {
  const std::size_t n = field_.dim();
  const std::size_t m = field_.size();
  if (x.size() != n) throw std::invalid_argument("query point has wrong dimension");

  LasryLionsEvaluation out;
  out.x.assign(x.begin(), x.end());
  if (affine_) {
    // All jets are one affine function; the convolutions leave it unchanged.
    const Site& s0 = field_[0];
    out.value = s0.alpha + dot_diff(s0.v, x, s0.s);
    out.gradient = s0.v;
    out.z_bar = out.x;
    out.weights.assign(m, 0.0);
    out.weights[0] = 1.0;
    return out;
  }
  if (!(eps > 0.0) || !(eps * modulus_ < 1.0))
    throw std::invalid_argument("eps must lie in (0, 1/M)");

  std::vector<double> c(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Site& site = field_[i];
    c[i] = site.alpha + dot_diff(site.v, x, site.s) + 0.5 * eps * squared_norm(site.v);
  }
  const SimplexQuadraticProblem problem(std::move(c), n, columns_, eps);
  SimplexSolution sol = solve(problem);

  out.value = sol.value;
  out.gradient.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (sol.lambda[i] == 0.0) continue;
    for (std::size_t k = 0; k < n; ++k) out.gradient[k] += sol.lambda[i] * field_[i].v[k];
  }
  out.z_bar.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.z_bar[k] = x[k] - eps * out.gradient[k];
  out.weights = std::move(sol.lambda);
  return out;
}

ExtensionValue ConvexExtension::eval_F(std::span<const double> x) const {
  LasryLionsEvaluation e = eval_lasry_lions(x);
  ExtensionValue out;
  out.value = e.value;
  out.gradient = std::move(e.gradient);
  out.lip_bound = affine_ ? 0.0 : 1.0 / eps();
  return out;
}

}  // namespace jetext
