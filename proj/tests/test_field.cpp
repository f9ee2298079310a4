#include <cmath>
#include <random>

#include "doctest.h"
#include "fields.hpp"
#include "jetext/field.hpp"

using namespace jetext;
using namespace jetext::testing;

namespace {

bool close_rel(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Applies x -> Q x with Q = I - 2 u u^T / |u|^2 to sites and gradients.
TaylorField1 reflect(const TaylorField1& field, const Point& u) {
  const double uu = squared_norm(u);
  auto apply = [&](const Point& x) {
    const double t = 2.0 * dot(u, x) / uu;
    Point y = x;
    for (std::size_t k = 0; k < y.size(); ++k) y[k] -= t * u[k];
    return y;
  };
  std::vector<Site> sites;
  for (const Site& s : field.sites()) sites.push_back({apply(s.s), s.alpha, apply(s.v)});
  return TaylorField1(field.dim(), std::move(sites));
}

}  // namespace

TEST_CASE("K1 on the reference fields") {
  CHECK(compute_K1(example_k1_only(3.0)) == 3.0);
  CHECK(compute_K1(single_site(2)) == 0.0);
  // alpha = s^2, v = 2s on {-1, 1}: |1 - 1 - (-2)(2)| / 4 = 1 both ways.
  CHECK(compute_K1(parabola_trace()) == 1.0);
}

TEST_CASE("K2 on the reference fields") {
  CHECK(compute_K2(example_k2_only(2.0)) == 2.0);
  CHECK(compute_K2(affine_trace({1.0, -2.0}, 0.5, {{0, 0}, {1, 0}, {0, 3}})) == 0.0);
  CHECK(compute_K2(parabola_trace()) == 2.0);
}

TEST_CASE("gamma1 on the reference fields") {
  // A = 2 * 3 / 1 = 6, B = 0.
  CHECK(compute_gamma1(example_k1_only(3.0)) == 12.0);
  // A = 0, |B| = 4 / 2.
  CHECK(compute_gamma1(parabola_trace()) == 2.0);
  CHECK(compute_gamma1(single_site(3)) == 0.0);
}

TEST_CASE("smallest convexity modulus") {
  SUBCASE("parabola trace needs M = 2") {
    const auto cm = smallest_convexity_modulus(parabola_trace());
    REQUIRE(cm.feasible());
    CHECK(*cm.m_star == 2.0);
  }
  SUBCASE("value below the tangent line is infeasible") {
    const auto field = make_field(1, {{{0.0}, 0.0, {0.0}}, {{1.0}, -1.0, {0.0}}});
    const auto cm = smallest_convexity_modulus(field);
    CHECK_FALSE(cm.feasible());
    REQUIRE(cm.witness.has_value());
    CHECK(cm.witness->first == 0);
    CHECK(cm.witness->second == 1);
    CHECK(cm.witness_gap == -1.0);
  }
  SUBCASE("zero gap with distinct gradients is infeasible") {
    // alpha(1) = alpha(0) + v(0) (1 - 0) exactly, but v(1) != v(0).
    const auto field = make_field(1, {{{0.0}, 0.0, {1.0}}, {{1.0}, 1.0, {2.0}}});
    CHECK_FALSE(smallest_convexity_modulus(field).feasible());
  }
  SUBCASE("affine trace gives zero") {
    const auto field = affine_trace({0.3, -1.7, 2.1}, 0.9,
                                    {{0.1, 0.2, 0.3}, {-1.3, 0.7, 2.2}, {1.9, -0.4, 0.05}, {0, 0, 1}});
    const auto cm = smallest_convexity_modulus(field);
    REQUIRE(cm.feasible());
    CHECK(*cm.m_star == 0.0);
  }
  SUBCASE("a pure value jump is not convex-feasible") {
    CHECK_FALSE(smallest_convexity_modulus(example_k1_only(3.0)).feasible());
  }
}

TEST_CASE("K1 and K2 are bounded by gamma1 on the reference fields") {
  const auto r1 = lemma_bounds_report(example_k1_only(3.0));
  CHECK(r1.K2_bound_ok);
  CHECK(r1.K1_bound_ok);
  CHECK(r1.K1_slack == 0.0);  // tight: 4 * 3 - 0 = 12
  CHECK(r1.K2_slack == 12.0);

  const auto r2 = lemma_bounds_report(example_k2_only(2.0));
  CHECK(r2.K2_bound_ok);
  CHECK(r2.K1_bound_ok);

  const auto r3 = lemma_bounds_report(single_site(1));
  CHECK(r3.K2_bound_ok);
  CHECK(r3.K1_bound_ok);
  CHECK(r3.K1_slack == 0.0);
  CHECK(r3.K2_slack == 0.0);
}

TEST_CASE("K1 and K2 are independent") {
  CHECK(compute_K1(example_k1_only(5.0)) > 0.0);
  CHECK(compute_K2(example_k1_only(5.0)) == 0.0);
  CHECK(compute_K1(example_k2_only(5.0)) == 0.0);
  CHECK(compute_K2(example_k2_only(5.0)) == 5.0);
}

TEST_CASE("field validation") {
  SUBCASE("coincident sites") {
    CHECK_THROWS_AS(make_field(1, {{{0.5}, 0.0, {0.0}}, {{0.5}, 1.0, {0.0}}}), FieldError);
    try {
      make_field(2, {{{0, 0}, 0, {0, 0}}, {{1, 1}, 0, {0, 0}}, {{1, 1 + 1e-14}, 0, {0, 0}}});
      FAIL("expected FieldError");
    } catch (const FieldError& e) {
      CHECK(e.site() == 2u);
    }
  }
  SUBCASE("nearby but distinct sites are accepted") {
    CHECK_NOTHROW(make_field(1, {{{0.0}, 0.0, {0.0}}, {{1e-9}, 0.0, {0.0}}}));
  }
  SUBCASE("wrong lengths") {
    CHECK_THROWS_AS(make_field(2, {{{0.0}, 0.0, {0.0, 0.0}}}), FieldError);
    CHECK_THROWS_AS(make_field(2, {{{0.0, 1.0}, 0.0, {0.0}}}), FieldError);
  }
  SUBCASE("non-finite entries") {
    CHECK_THROWS_AS(make_field(1, {{{0.0}, NAN, {0.0}}}), FieldError);
    CHECK_THROWS_AS(make_field(1, {{{INFINITY}, 0.0, {0.0}}}), FieldError);
  }
  SUBCASE("empty field and zero dimension") {
    CHECK_THROWS_AS(make_field(1, {}), FieldError);
    CHECK_THROWS_AS(make_field(0, {{{}, 0.0, {}}}), FieldError);
  }
}

TEST_CASE("property: lemma bounds hold on random fields") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto field = random_field(rng, 1 + trial % 3, 2 + trial % 12);
    const auto r = lemma_bounds_report(field);
    CHECK(r.K2_bound_ok);
    CHECK(r.K1_bound_ok);
  }
}

TEST_CASE("property: constants are invariant under rigid motions and affine shifts") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    const auto field = trial % 2 ? random_field(rng, dim, 6) : random_convex_field(rng, dim, 6);
    const auto base = compute_constants(field);

    const Point shift = random_point(rng, dim, -3.0, 3.0);
    const Point c = random_point(rng, dim, -2.0, 2.0);
    const double b = 0.7;
    std::vector<Site> translated, shifted;
    for (const Site& s : field.sites()) {
      Point t = s.s;
      for (std::size_t k = 0; k < dim; ++k) t[k] += shift[k];
      translated.push_back({t, s.alpha, s.v});
      Point v = s.v;
      for (std::size_t k = 0; k < dim; ++k) v[k] += c[k];
      shifted.push_back({s.s, s.alpha + dot(c, s.s) + b, v});
    }
    const Point u = random_point(rng, dim, -1.0, 1.0);
    for (const TaylorField1& other :
         {TaylorField1(dim, translated), TaylorField1(dim, shifted), reflect(field, u)}) {
      const auto k = compute_constants(other);
      CHECK(close_rel(k.K1, base.K1, 1e-10));
      CHECK(close_rel(k.K2, base.K2, 1e-10));
      CHECK(close_rel(k.gamma1, base.gamma1, 1e-10));
    }
  }
}

TEST_CASE("property: constants scale linearly with the jets") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    const auto field = random_convex_field(rng, dim, 5);
    const double t = 0.1 + 5.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<Site> scaled;
    for (const Site& s : field.sites()) {
      Point v = s.v;
      for (double& x : v) x *= t;
      scaled.push_back({s.s, t * s.alpha, v});
    }
    const auto a = compute_constants(field);
    const auto b = compute_constants(TaylorField1(dim, scaled));
    CHECK(close_rel(b.K1, t * a.K1, 1e-10));
    CHECK(close_rel(b.K2, t * a.K2, 1e-10));
    CHECK(close_rel(b.gamma1, t * a.gamma1, 1e-10));
    REQUIRE(a.convexity.feasible());
    REQUIRE(b.convexity.feasible());
    CHECK(close_rel(*b.convexity.m_star, t * *a.convexity.m_star, 1e-10));
  }
}

TEST_CASE("property: the smallest modulus satisfies every pairwise inequality") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto field = random_convex_field(rng, 1 + trial % 3, 2 + trial % 15);
    const auto cm = smallest_convexity_modulus(field);
    REQUIRE(cm.feasible());
    const double M = *cm.m_star * (1.0 + 1e-12);
    for (const Site& a : field.sites())
      for (const Site& b : field.sites()) {
        if (&a == &b) continue;
        const double rhs = a.alpha + dot_diff(a.v, b.s, a.s) + squared_distance(a.v, b.v) / (2.0 * M);
        CHECK(b.alpha >= rhs - 1e-14 * (1.0 + std::fabs(b.alpha)));
      }
  }
}
