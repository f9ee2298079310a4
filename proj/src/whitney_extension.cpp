#include "jetext/whitney_extension.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace jetext {

double compute_mu_bar(double K1, double K2) {
  if (!(K1 >= 0.0) || !(K2 >= 0.0)) throw std::invalid_argument("compute_mu_bar: K1, K2 must be >= 0");
  const double a = 2.0 * K1 + K2;
  return a + std::sqrt(a * a + K2 * K2);
}

double tilted_modulus(double mu, double K1, double K2) {
  if (!(mu > 2.0 * K1)) throw std::invalid_argument("tilted_modulus: requires mu > 2 K1");
  return (mu + K2) * (mu + K2) / (mu - 2.0 * K1);
}

double tilt_budget(double mu, double K1, double K2) {
  return std::max(mu, tilted_modulus(mu, K1, K2) - mu);
}

TaylorField1 tilt_field(const TaylorField1& field, double mu) {
  std::vector<Site> sites = field.sites();
  for (Site& site : sites) {
    site.alpha += 0.5 * mu * squared_norm(site.s);
    for (std::size_t k = 0; k < site.v.size(); ++k) site.v[k] += mu * site.s[k];
  }
  return TaylorField1(field.dim(), std::move(sites));
}

WhitneyExtension WhitneyExtension::build(TaylorField1 field, double eps_fraction,
                                         std::optional<double> modulus) {
  if (!(eps_fraction > 0.0 && eps_fraction < 1.0))
    throw std::invalid_argument("eps_fraction must lie in (0, 1)");
  const double K1 = compute_K1(field);
  const double K2 = compute_K2(field);

  if (K1 == 0.0 && K2 == 0.0) {
    // One affine function carries every jet; mu = 0 and the tilted
    // modulus is 0/0, so G is that affine function.
    TaylorField1 copy = field;
    WhitneyExtension ext(std::move(field), std::move(copy));
    ext.eps_fraction_ = eps_fraction;
    return ext;
  }

  const double mu = compute_mu_bar(K1, K2);
  const double M = tilted_modulus(mu, K1, K2);
  TaylorField1 tilted = tilt_field(field, mu);

  const ConvexityModulus cm = smallest_convexity_modulus(tilted);
  if (!cm.feasible() || *cm.m_star > M * (1.0 + 1e-9)) {
    throw std::logic_error("tilted field fails the convex compatibility check at modulus " +
                           std::to_string(M) +
                           (cm.feasible() ? " (needs " + std::to_string(*cm.m_star) + ")"
                                          : std::string(" (infeasible)")));
  }
  // Round-off can put the computed smallest modulus a hair above M.
  const double chosen = modulus.value_or(std::max(M, *cm.m_star));

  WhitneyExtension ext(std::move(field), tilted);
  ext.K1_ = K1;
  ext.K2_ = K2;
  ext.mu_bar_ = mu;
  ext.modulus_ = chosen;
  ext.eps_fraction_ = eps_fraction;
  ext.convex_.emplace(std::move(tilted), chosen, eps_fraction);
  return ext;
}

double WhitneyExtension::semiconcavity_bound() const {
  if (is_affine()) return 0.0;
  return modulus_ / eps_fraction_ - mu_bar_;
}

GradientValue WhitneyExtension::eval_G(std::span<const double> x) const {
  GradientValue out;
  if (is_affine()) {
    if (x.size() != base_.dim()) throw std::invalid_argument("query point has wrong dimension");
    const Site& s0 = base_[0];
    out.value = s0.alpha + dot_diff(s0.v, x, s0.s);
    out.gradient = s0.v;
    return out;
  }
  ExtensionValue F = convex_->eval_F(x);
  out.value = F.value - 0.5 * mu_bar_ * squared_norm(x);
  out.gradient = std::move(F.gradient);
  for (std::size_t k = 0; k < x.size(); ++k) out.gradient[k] -= mu_bar_ * x[k];
  return out;
}

CertificationReport certify(const WhitneyExtension& ext, const CertifyOptions& options) {
  const TaylorField1& field = ext.base_field();
  const std::size_t n = field.dim();
  const Box& box = options.box;
  if (box.lo.size() != n || box.hi.size() != n)
    throw std::invalid_argument("certify: box dimension does not match the field");
  for (std::size_t k = 0; k < n; ++k)
    if (!(box.lo[k] < box.hi[k])) throw std::invalid_argument("certify: box requires lo < hi");
  for (std::size_t i = 0; i < field.size(); ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (field[i].s[k] < box.lo[k] || field[i].s[k] > box.hi[k])
        throw std::invalid_argument("certify: box does not contain site " + std::to_string(i));

  CertificationReport r;
  r.n_samples = options.n_samples;
  r.gamma1 = compute_gamma1(field, options.exec);
  r.mu_bar = ext.mu_bar();
  r.semiconcave_bound = ext.semiconcavity_bound();
  r.lipschitz_budget = ext.lipschitz_budget();

  for (const Site& site : field.sites()) {
    const GradientValue g = ext.eval_G(site.s);
    r.interp_value_resid =
        std::max(r.interp_value_resid, std::fabs(g.value - site.alpha) / (1.0 + std::fabs(site.alpha)));
    r.interp_grad_resid =
        std::max(r.interp_grad_resid, distance(g.gradient, site.v) / (1.0 + norm(site.v)));
  }

  // Points are drawn serially so the sample is fixed by the seed alone.
  const std::size_t pairs = options.n_samples;
  std::vector<Point> points(2 * pairs, Point(n));
  std::mt19937_64 rng(options.seed);
  std::vector<std::uniform_real_distribution<double>> axis;
  for (std::size_t k = 0; k < n; ++k) axis.emplace_back(box.lo[k], box.hi[k]);
  for (Point& p : points)
    for (std::size_t k = 0; k < n; ++k) p[k] = axis[k](rng);

  std::vector<GradientValue> values(points.size());
  detail::for_each_index(points.size(), options.exec,
                         [&](std::size_t i) { values[i] = ext.eval_G(points[i]); });

  for (std::size_t p = 0; p < pairs; ++p) {
    const Point& x = points[2 * p];
    const Point& y = points[2 * p + 1];
    const GradientValue& gx = values[2 * p];
    const GradientValue& gy = values[2 * p + 1];
    const double d2 = squared_distance(x, y);
    if (d2 == 0.0) continue;
    r.lip_grad_sampled = std::max(r.lip_grad_sampled, distance(gx.gradient, gy.gradient) / std::sqrt(d2));
    // Taylor remainders from both ends of the pair.
    const double rxy = gy.value - gx.value - dot_diff(gx.gradient, y, x);
    const double ryx = gx.value - gy.value - dot_diff(gy.gradient, x, y);
    for (double rem : {rxy, ryx}) {
      r.semiconvex_sampled = std::max(r.semiconvex_sampled, -2.0 * rem / d2);
      r.semiconcave_sampled = std::max(r.semiconcave_sampled, 2.0 * rem / d2);
    }
  }
  r.minimality_ratio = r.gamma1 > 0.0 ? r.lip_grad_sampled / r.gamma1 : 0.0;

  auto within = [](double sampled, double bound) {
    return sampled <= bound * (1.0 + kSampledBoundSlack) + 1e-9;
  };
  r.interp_ok = r.interp_value_resid <= kInterpValueTol && r.interp_grad_resid <= kInterpGradTol;
  r.ratio_ok = r.minimality_ratio <= kAlmostMinimalityFactor * (1.0 + kSampledBoundSlack);
  r.lipschitz_ok = within(r.lip_grad_sampled, r.lipschitz_budget);
  r.semiconvex_ok = within(r.semiconvex_sampled, r.mu_bar);
  r.semiconcave_ok = within(r.semiconcave_sampled, r.semiconcave_bound);
  r.pass = r.interp_ok && r.ratio_ok && r.lipschitz_ok && r.semiconvex_ok && r.semiconcave_ok;
  return r;
}

}  // namespace jetext
