#include "jetext/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace jetext {

namespace {

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// Per-row maxima are computed independently and folded serially, so the
// serial and OpenMP paths agree bit for bit.
template <typename RowFn>
double row_max(std::size_t rows, Exec exec, RowFn&& row) {
  std::vector<double> best(rows, 0.0);
  detail::for_each_index(rows, exec, [&](std::size_t i) { best[i] = row(i); });
  double m = 0.0;
  for (double b : best) m = std::max(m, b);
  return m;
}

constexpr double kRoundoff = 16.0 * std::numeric_limits<double>::epsilon();

}  // namespace

TaylorField1::TaylorField1(std::size_t dim, std::vector<Site> sites)
    : dim_(dim), sites_(std::move(sites)) {
  if (dim_ == 0) throw FieldError("field dimension must be positive", std::nullopt);
  if (sites_.empty()) throw FieldError("field must contain at least one site", std::nullopt);
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const Site& site = sites_[i];
    if (site.s.size() != dim_ || site.v.size() != dim_) {
      throw FieldError("site " + std::to_string(i) + ": expected " + std::to_string(dim_) +
                           " coordinates in s and v",
                       i);
    }
    if (!std::isfinite(site.alpha) || !all_finite(site.s) || !all_finite(site.v)) {
      throw FieldError("site " + std::to_string(i) + ": non-finite entry", i);
    }
  }
  double scale = 0.0;
  for (const Site& site : sites_) scale = std::max(scale, max_abs(site.s));
  const double min_separation = kDuplicateSiteTolerance * (1.0 + scale);
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(sites_[i].s, sites_[j].s) <= min_separation) {
        throw FieldError("site " + std::to_string(i) + " coincides with site " + std::to_string(j),
                         i);
      }
    }
  }
}

double compute_K1(const TaylorField1& field, Exec exec) {
  const std::size_t m = field.size();
  return row_max(m, exec, [&](std::size_t i) {
    const Site& a = field[i];
    double best = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const Site& b = field[j];
      const double gap = b.alpha - a.alpha - dot_diff(a.v, b.s, a.s);
      best = std::max(best, std::fabs(gap) / squared_distance(a.s, b.s));
    }
    return best;
  });
}

double compute_K2(const TaylorField1& field, Exec exec) {
  const std::size_t m = field.size();
  return row_max(m, exec, [&](std::size_t i) {
    const Site& a = field[i];
    double best = 0.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const Site& b = field[j];
      best = std::max(best, distance(a.v, b.v) / distance(a.s, b.s));
    }
    return best;
  });
}

double compute_gamma1(const TaylorField1& field, Exec exec) {
  const std::size_t m = field.size();
  const std::size_t n = field.dim();
  return row_max(m, exec, [&](std::size_t i) {
    const Site& a = field[i];
    double best = 0.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const Site& b = field[j];
      const double d2 = squared_distance(a.s, b.s);
      double sum_term = 0.0;
      for (std::size_t k = 0; k < n; ++k) sum_term += (a.v[k] + b.v[k]) * (b.s[k] - a.s[k]);
      const double A = (2.0 * (a.alpha - b.alpha) + sum_term) / d2;
      const double B2 = squared_distance(a.v, b.v) / d2;
      best = std::max(best, std::sqrt(A * A + B2) + std::fabs(A));
    }
    return best;
  });
}

ConvexityModulus smallest_convexity_modulus(const TaylorField1& field, Exec exec) {
  struct Row {
    double ratio = 0.0;
    std::optional<std::size_t> violator;
    double violator_gap = 0.0;
  };
  const std::size_t m = field.size();
  std::vector<Row> rows(m);
  detail::for_each_index(m, exec, [&](std::size_t i) {
    const Site& a = field[i];
    Row row;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const Site& b = field[j];
      double gap = b.alpha - a.alpha - dot_diff(a.v, b.s, a.s);
      const double gap_scale =
          std::fabs(b.alpha) + std::fabs(a.alpha) + norm(a.v) * distance(a.s, b.s);
      if (std::fabs(gap) <= kRoundoff * gap_scale) gap = 0.0;
      double dv2 = squared_distance(a.v, b.v);
      const double v_scale = kRoundoff * (norm(a.v) + norm(b.v));
      if (dv2 <= v_scale * v_scale) dv2 = 0.0;

      if (gap < 0.0 || (gap == 0.0 && dv2 > 0.0)) {
        row.violator = j;
        row.violator_gap = gap;
        break;
      }
      if (dv2 > 0.0) row.ratio = std::max(row.ratio, dv2 / (2.0 * gap));
    }
    rows[i] = row;
  });

  ConvexityModulus result;
  double m_star = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].violator) {
      result.witness = SitePair{i, *rows[i].violator};
      result.witness_gap = rows[i].violator_gap;
      return result;
    }
    m_star = std::max(m_star, rows[i].ratio);
  }
  result.m_star = m_star;
  return result;
}

FieldConstants compute_constants(const TaylorField1& field, Exec exec) {
  FieldConstants c;
  c.K1 = compute_K1(field, exec);
  c.K2 = compute_K2(field, exec);
  c.gamma1 = compute_gamma1(field, exec);
  c.convexity = smallest_convexity_modulus(field, exec);
  return c;
}

LemmaBoundsReport lemma_bounds_report(const FieldConstants& c) {
  constexpr double kRelSlack = 1e-12;
  LemmaBoundsReport r;
  const double lhs1 = 4.0 * c.K1 - 2.0 * c.K2;
  r.K2_slack = c.gamma1 - c.K2;
  r.K1_slack = c.gamma1 - lhs1;
  r.K2_bound_ok = c.K2 <= c.gamma1 + kRelSlack * std::max(c.gamma1, c.K2);
  r.K1_bound_ok =
      lhs1 <= c.gamma1 + kRelSlack * std::max({c.gamma1, 4.0 * c.K1, 2.0 * c.K2});
  return r;
}

LemmaBoundsReport lemma_bounds_report(const TaylorField1& field, Exec exec) {
  FieldConstants c;
  c.K1 = compute_K1(field, exec);
  c.K2 = compute_K2(field, exec);
  c.gamma1 = compute_gamma1(field, exec);
  return lemma_bounds_report(c);
}

}  // namespace jetext
