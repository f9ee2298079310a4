#include <cmath>
#include <random>

#include "doctest.h"
#include "fields.hpp"
#include "jetext/whitney_extension.hpp"
#include "oracle.hpp"

using namespace jetext;
using namespace jetext::testing;

namespace {

Box padded_box(const TaylorField1& field, double pad) {
  Box b{field[0].s, field[0].s};
  for (const Site& s : field.sites())
    for (std::size_t k = 0; k < field.dim(); ++k) {
      b.lo[k] = std::min(b.lo[k], s.s[k]);
      b.hi[k] = std::max(b.hi[k], s.s[k]);
    }
  for (std::size_t k = 0; k < field.dim(); ++k) {
    b.lo[k] -= pad;
    b.hi[k] += pad;
  }
  return b;
}

}  // namespace

TEST_CASE("mu_bar closed form") {
  CHECK(compute_mu_bar(1.0, 1.0) == doctest::Approx(3.0 + std::sqrt(10.0)).epsilon(1e-15));
  CHECK(compute_mu_bar(1.0, 0.0) == 4.0);
  CHECK(compute_mu_bar(0.0, 0.0) == 0.0);
  CHECK(tilt_budget(4.0, 1.0, 0.0) == 4.0);
  CHECK_THROWS_AS(compute_mu_bar(-1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(tilted_modulus(2.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("mu_bar agrees with a brute-force scan") {
  const auto scan = oracle::scan_mu(1.0, 0.0, 2.0, 20.0, 1e-4);
  CHECK(scan.mu == doctest::Approx(4.0).epsilon(2e-4));
  CHECK(scan.value == doctest::Approx(4.0).epsilon(1e-6));

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double K1 = u(rng), K2 = trial % 5 == 0 ? 0.0 : u(rng);
    const double mu = compute_mu_bar(K1, K2);
    const auto s = oracle::scan_mu(K1, K2, 2.0 * K1, 2.0 * K1 + 10.0 * (K1 + K2) + 10.0, 1e-4);
    CHECK(std::fabs(s.mu - mu) <= 2e-4 * mu);
    // Balance: both branches of the max agree at the optimum.
    CHECK(std::fabs(tilted_modulus(mu, K1, K2) - 2.0 * mu) <= 1e-9 * mu);
    for (double f : {1.0 - 1e-3, 1.0 + 1e-3}) {
      const double other = mu * f;
      if (other > 2.0 * K1) CHECK(tilt_budget(other, K1, K2) >= tilt_budget(mu, K1, K2) - 1e-9);
    }
  }
}

TEST_CASE("tilting") {
  const auto twice = tilt_field(parabola_trace(), 2.0);
  CHECK(twice[0].alpha == 2.0);
  CHECK(twice[1].alpha == 2.0);
  CHECK(twice[0].v[0] == -4.0);
  CHECK(twice[1].v[0] == 4.0);

  std::mt19937_64 rng(42);
  const auto field = random_field(rng, 3, 7);
  const auto same = tilt_field(field, 0.0);
  const auto back = tilt_field(tilt_field(field, 3.7), -3.7);
  for (std::size_t i = 0; i < field.size(); ++i) {
    CHECK(same[i].alpha == field[i].alpha);
    CHECK(same[i].v == field[i].v);
    CHECK(back[i].s == field[i].s);
    CHECK(std::fabs(back[i].alpha - field[i].alpha) <= 1e-12 * (1.0 + std::fabs(field[i].alpha)));
    CHECK(distance(back[i].v, field[i].v) <= 1e-12 * (1.0 + norm(field[i].v)));
  }
}

TEST_CASE("build on the reference fields") {
  SUBCASE("K1-only example") {
    const auto ext = WhitneyExtension::build(example_k1_only(3.0));
    CHECK(ext.K1() == 3.0);
    CHECK(ext.K2() == 0.0);
    CHECK(ext.mu_bar() == 12.0);
    CHECK(ext.modulus() == doctest::Approx(24.0).epsilon(1e-12));
    CHECK(ext.tilted_field()[1].alpha == 6.0);
    CHECK(ext.tilted_field()[1].v[0] == 12.0);
  }
  SUBCASE("parabola trace") {
    const auto ext = WhitneyExtension::build(parabola_trace());
    const double mu = 4.0 + std::sqrt(20.0);
    CHECK(ext.mu_bar() == doctest::Approx(mu).epsilon(1e-15));
    CHECK(ext.modulus() == doctest::Approx((mu + 2) * (mu + 2) / (mu - 2)).epsilon(1e-12));
    CHECK(ext.mu_bar() > 2.0 * ext.K1());
    CHECK(*smallest_convexity_modulus(ext.tilted_field()).m_star <= ext.modulus() * (1.0 + 1e-9));
  }
  SUBCASE("affine field") {
    const auto field = affine_trace({1.0, 2.0}, -0.5, {{0, 0}, {1, 1}, {-1, 2}});
    const auto ext = WhitneyExtension::build(field);
    CHECK(ext.is_affine());
    CHECK(ext.mu_bar() == 0.0);
    const auto g = ext.eval_G(Point{2.0, -3.0});
    CHECK(g.value == 2.0 - 6.0 - 0.5);
    CHECK(g.gradient == Point{1.0, 2.0});
  }
  SUBCASE("bad eps fraction") {
    CHECK_THROWS_AS(WhitneyExtension::build(parabola_trace(), 0.0), std::invalid_argument);
  }
}

TEST_CASE("G interpolates arbitrary fields") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto field = random_field(rng, n, 2 + trial % 19);
    const auto ext = WhitneyExtension::build(field);
    for (const Site& s : field.sites()) {
      const auto g = ext.eval_G(s.s);
      CHECK(std::fabs(g.value - s.alpha) <= kInterpValueTol * (1.0 + std::fabs(s.alpha)));
      CHECK(distance(g.gradient, s.v) <= kInterpGradTol * (1.0 + norm(s.v)));
    }
  }
}

TEST_CASE("parabola trace at the origin matches the grid pipeline") {
  const auto ext = WhitneyExtension::build(parabola_trace(), 0.9);
  const double eps = 0.9 / ext.modulus();
  const auto& tilted = ext.tilted_field();
  oracle::GridSpec grid{{-4.0}, {4.0}, 8001};
  const auto nodes = grid.nodes();
  std::vector<double> f_tab(nodes.size()), sup_tab(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) f_tab[i] = eval_f(tilted, nodes[i]);
  for (std::size_t i = 0; i < nodes.size(); ++i) sup_tab[i] = oracle::grid_supconv_tabulated(f_tab, grid, eps, nodes[i]);
  const double brute = oracle::grid_infconv_tabulated(sup_tab, grid, eps, Point{0.0});
  CHECK(std::fabs(ext.eval_G(Point{0.0}).value - brute) <= 5e-4);
}

TEST_CASE("certification on the reference fields") {
  SUBCASE("K1-only example") {
    const auto ext = WhitneyExtension::build(example_k1_only(3.0));
    const auto r = certify(ext, {.n_samples = 10000, .seed = 1, .box = {{-1.0}, {2.0}}});
    CHECK(r.gamma1 == 12.0);
    CHECK(r.pass);
    // Budget at finite eps: max{12, 24 / eps_fraction - 12} = 12 + 2.4e-5.
    CHECK(r.lipschitz_budget == doctest::Approx(12.0 + 24.0 * (1.0 / kDefaultEpsFraction - 1.0)).epsilon(1e-12));
    CHECK(r.lip_grad_sampled <= r.lipschitz_budget * (1.0 + 1e-9));
    CHECK(r.minimality_ratio <= r.lipschitz_budget / 12.0 * (1.0 + 1e-9));
    CHECK(r.lip_grad_sampled > 11.0);
  }
  SUBCASE("parabola trace") {
    const auto ext = WhitneyExtension::build(parabola_trace());
    const auto r = certify(ext, {.n_samples = 10000, .seed = 2, .box = {{-2.0}, {2.0}}});
    CHECK(r.pass);
    CHECK(r.minimality_ratio <= kAlmostMinimalityFactor);
    CHECK(r.interp_value_resid <= kInterpValueTol);
  }
  SUBCASE("affine field") {
    const auto field = affine_trace({1.0}, 0.0, {{0.0}, {1.0}});
    const auto r = certify(WhitneyExtension::build(field), {.n_samples = 100, .seed = 3, .box = {{-1.0}, {2.0}}});
    CHECK(r.interp_value_resid == 0.0);
    CHECK(r.interp_grad_resid == 0.0);
    CHECK(r.minimality_ratio == 0.0);
    CHECK(r.pass);
  }
  SUBCASE("box must contain the sites") {
    const auto ext = WhitneyExtension::build(parabola_trace());
    CHECK_THROWS_AS(certify(ext, {.n_samples = 10, .seed = 0, .box = {{0.0}, {2.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(certify(ext, {.n_samples = 10, .seed = 0, .box = {{2.0}, {-2.0}}}), std::invalid_argument);
  }
}

TEST_CASE("property: certification passes on random fields") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto field = random_field(rng, n, 2 + trial % 10);
    const auto ext = WhitneyExtension::build(field);
    const auto r = certify(ext, {.n_samples = 1000, .seed = static_cast<std::uint64_t>(trial), .box = padded_box(field, 1.0)});
    CHECK(r.interp_ok);
    CHECK(r.ratio_ok);
    CHECK(r.lipschitz_ok);
    CHECK(r.semiconvex_ok);
    CHECK(r.semiconcave_ok);
  }
}

TEST_CASE("property: gamma1 of the base field bounds gamma1 of any extended sample") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto field = random_field(rng, n, 3 + trial % 6);
    const auto ext = WhitneyExtension::build(field);
    std::vector<Site> sites = field.sites();
    const Box box = padded_box(field, 0.5);
    oracle::BoxSampler sampler(box.lo, box.hi, 100 + trial);
    for (int k = 0; k < 30; ++k) {
      Point x = sampler.next();
      const auto g = ext.eval_G(x);
      sites.push_back({std::move(x), g.value, g.gradient});
    }
    CHECK(compute_gamma1(field) <= compute_gamma1(TaylorField1(n, std::move(sites))) + 1e-9);
  }
}

TEST_CASE("property: G is mu-semiconvex") {
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto field = random_field(rng, n, 2 + trial % 8);
    const auto ext = WhitneyExtension::build(field);
    const double mu = ext.mu_bar();
    for (int k = 0; k < 10; ++k) {
      const Point x = random_point(rng, n, -3, 3), y = random_point(rng, n, -3, 3);
      const double t = ut(rng);
      Point z(n);
      for (std::size_t j = 0; j < n; ++j) z[j] = t * x[j] + (1 - t) * y[j];
      const double lhs = ext.eval_G(z).value;
      const double rhs = t * ext.eval_G(x).value + (1 - t) * ext.eval_G(y).value +
                         0.5 * mu * t * (1 - t) * squared_distance(x, y);
      CHECK(lhs <= rhs + 1e-8 * (1.0 + std::fabs(rhs)));
    }
  }
}

TEST_CASE("sampled gamma1 of (G, grad G) tracks the sampled gradient Lipschitz constant") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const auto ext = WhitneyExtension::build(random_field(rng, n, 4));
    const Box box = padded_box(ext.base_field(), 0.5);
    auto fn = [&](std::span<const double> x) { return ext.eval_G(x).value; };
    auto grad = [&](std::span<const double> x) { return ext.eval_G(x).gradient; };
    oracle::BoxSampler s1(box.lo, box.hi, 7), s2(box.lo, box.hi, 7);
    const double lip = oracle::sampled_lip_grad(grad, s1, 3000);
    const double gam = oracle::sampled_gamma1(fn, grad, s2, 3000);
    CHECK(std::fabs(gam - lip) <= 0.1 * lip);
  }
}

TEST_CASE("certification is deterministic across execution paths") {
  std::mt19937_64 rng(48);
  const auto field = random_field(rng, 2, 8);
  const auto ext = WhitneyExtension::build(field);
  CertifyOptions opts{.n_samples = 500, .seed = 9, .box = padded_box(field, 1.0)};
  const auto a = certify(ext, opts);
  opts.exec = Exec::kSerial;
  const auto b = certify(ext, opts);
  CHECK(a.lip_grad_sampled == b.lip_grad_sampled);
  CHECK(a.semiconvex_sampled == b.semiconvex_sampled);
  CHECK(a.semiconcave_sampled == b.semiconcave_sampled);
  CHECK(a.interp_value_resid == b.interp_value_resid);
}
