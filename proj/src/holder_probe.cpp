#include "jetext/holder_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace jetext {

void validate(const HolderProbeConfig& cfg) {
  if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
  if (!(cfg.M > 0.0) || !std::isfinite(cfg.M)) throw std::invalid_argument("M must be positive");
  if (!(cfg.v != 0.0) || !std::isfinite(cfg.v)) throw std::invalid_argument("v must be nonzero");
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) throw std::invalid_argument("eps must be positive");
  if (!(cfg.M * std::pow(cfg.eps, cfg.theta) < 1.0))
    throw std::invalid_argument("M eps^theta must be < 1");
  if (cfg.grid_points < 1000) throw std::invalid_argument("grid_points must be >= 1000");
  if (cfg.grid_halfwidth && !(*cfg.grid_halfwidth > 0.0))
    throw std::invalid_argument("grid_halfwidth must be positive");
}

double q_theta(const HolderProbeConfig& cfg, double x) {
  return cfg.v * x + cfg.M / (1.0 + cfg.theta) * std::pow(std::fabs(x), 1.0 + cfg.theta);
}

double holder_kernel(const HolderProbeConfig& cfg, double d) {
  return std::pow(std::fabs(d), 1.0 + cfg.theta) / ((1.0 + cfg.theta) * std::pow(cfg.eps, cfg.theta));
}

double probe_y_bar(const HolderProbeConfig& cfg) {
  return -cfg.eps * cfg.v * std::pow(std::fabs(cfg.v), 1.0 / cfg.theta - 1.0);
}

double probe_prefactor(const HolderProbeConfig& cfg) { return holder_kernel(cfg, probe_y_bar(cfg)); }

double lambda_probe(const HolderProbeConfig& cfg, double lambda) {
  const double p = 1.0 + cfg.theta;
  return cfg.M * std::pow(cfg.eps, cfg.theta) * std::pow(std::fabs(lambda), p) - p * lambda -
         std::pow(std::fabs(lambda - 1.0), p) + 1.0;
}

LambdaProbeResult find_positive_lambda(const HolderProbeConfig& cfg) {
  validate(cfg);
  if (!(cfg.theta < 1.0)) throw std::invalid_argument("find_positive_lambda requires theta < 1");
  constexpr int kSteps = 4000;
  const double log_lo = std::log(1e-10);
  const double log_hi = std::log(0.5);
  LambdaProbeResult best;
  best.y_bar = probe_y_bar(cfg);
  best.psi_star = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kSteps; ++k) {
    const double lambda =
        k == kSteps ? 0.5 : std::exp(log_lo + (log_hi - log_lo) * k / static_cast<double>(kSteps));
    const double psi = lambda_probe(cfg, lambda);
    if (psi > best.psi_star) {
      best.psi_star = psi;
      best.lambda_star = lambda;
    }
  }
  if (!(best.psi_star > 0.0)) throw std::runtime_error("no lambda in (0, 1/2] gives a positive probe");
  return best;
}

std::string_view to_string(ProbeVerdict verdict) {
  switch (verdict) {
    case ProbeVerdict::kPositive: return "positive";
    case ProbeVerdict::kZero: return "zero";
    case ProbeVerdict::kInconclusive: break;
  }
  return "inconclusive";
}

namespace {

struct Pass {
  double value = 0.0;  // min over z of the grid sup: at or below the true value
  double upper = 0.0;  // continuous sup at the chosen z: at or above the true value
  double z_star = 0.0;
};

// Golden-section search for the minimum of f on [a, b].
template <typename F>
std::pair<double, double> golden_min(F&& f, double a, double b) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && b - a > 1e-15 * (1.0 + std::fabs(a)); ++it) {
    if (fc <= fd) {
      b = d, d = c, fd = fc;
      c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + r * (b - a), fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

// One sup-inf pass over the nodes i = first, first + stride, ... of the
// symmetric grid x_i = (i - K) h. The outer minimum is located on the grid,
// then polished over continuous z in the two neighbouring cells; the inner
// sup runs over the grid nodes. Finally the inner sup at the chosen z is
// polished over continuous y, which bounds the true value from above.
Pass sup_inf(const HolderProbeConfig& cfg, const std::vector<double>& node, const std::vector<double>& q,
             const std::vector<double>& kernel, std::size_t first, std::size_t stride, Exec exec) {
  const std::size_t n_fine = q.size();
  const std::size_t count = (n_fine - 1 - first) / stride + 1;
  auto at = [&](std::size_t k) { return first + k * stride; };
  std::vector<double> outer(count);
  detail::for_each_index(count, exec, [&](std::size_t jz) {
    const std::size_t j = at(jz);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i < n_fine; i += stride) best = std::max(best, q[i] - kernel[i > j ? i - j : j - i]);
    outer[jz] = best + holder_kernel(cfg, node[j]);
  });
  std::size_t jbest = 0;
  for (std::size_t jz = 1; jz < count; ++jz)
    if (outer[jz] < outer[jbest]) jbest = jz;

  auto S = [&](double z) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) best = std::max(best, q[at(k)] - holder_kernel(cfg, node[at(k)] - z));
    return best + holder_kernel(cfg, z);
  };

  Pass out{outer[jbest], 0.0, node[at(jbest)]};
  const auto [zc, fz] = golden_min(S, node[at(jbest > 0 ? jbest - 1 : 0)], node[at(std::min(jbest + 1, count - 1))]);
  if (fz < out.value) out.value = fz, out.z_star = zc;

  // The outer minimum typically balances several inner peaks, so polish
  // every discrete local maximum rather than just the best node.
  const double z = out.z_star;
  std::vector<double> val(count);
  for (std::size_t k = 0; k < count; ++k) val[k] = q[at(k)] - holder_kernel(cfg, node[at(k)] - z);
  double sup = *std::max_element(val.begin(), val.end());
  for (std::size_t k = 0; k < count; ++k) {
    if ((k > 0 && val[k - 1] > val[k]) || (k + 1 < count && val[k + 1] > val[k])) continue;
    const auto [yc, neg] = golden_min([&](double y) { return -(q_theta(cfg, y) - holder_kernel(cfg, y - z)); },
                                      node[at(k > 0 ? k - 1 : 0)], node[at(std::min(k + 1, count - 1))]);
    sup = std::max(sup, -neg);
  }
  out.upper = sup + holder_kernel(cfg, z);
  return out;
}

}  // namespace

GridProbeResult grid_sup_inf_conv(const HolderProbeConfig& cfg, Exec exec) {
  validate(cfg);
  GridProbeResult out;
  const double y_bar = probe_y_bar(cfg);
  out.halfwidth = cfg.grid_halfwidth.value_or(
      4.0 * std::max({std::fabs(y_bar), cfg.eps * std::pow(std::fabs(cfg.v), 1.0 / cfg.theta), 1.0}));
  // Symmetric grid through the site x = 0: 2K + 1 nodes.
  const std::size_t K = cfg.grid_points / 2;
  const std::size_t n = 2 * K + 1;
  out.nodes = n;
  out.step = out.halfwidth / static_cast<double>(K);

  std::vector<double> node(n), q(n), kernel(n);
  for (std::size_t i = 0; i < n; ++i) {
    node[i] = (static_cast<double>(i) - static_cast<double>(K)) * out.step;
    q[i] = q_theta(cfg, node[i]);
    kernel[i] = holder_kernel(cfg, static_cast<double>(i) * out.step);
  }

  const Pass fine = sup_inf(cfg, node, q, kernel, 0, 1, exec);
  // Every other node, keeping the one at the origin.
  const Pass coarse = sup_inf(cfg, node, q, kernel, K % 2, 2, exec);
  out.value = fine.value;
  out.coarse_value = coarse.value;
  out.z_star = fine.z_star;

  double scale = 1.0;
  for (double x : q) scale = std::max(scale, std::fabs(x));
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  out.upper_value = fine.upper;
  out.error_estimate = std::max({fine.upper - fine.value, std::fabs(fine.value - coarse.value), roundoff});

  if (out.value > 3.0 * out.error_estimate) {
    out.verdict = ProbeVerdict::kPositive;
  } else if (cfg.theta == 1.0 && std::fabs(out.value) <= 3.0 * out.error_estimate) {
    out.verdict = ProbeVerdict::kZero;
  } else {
    out.verdict = ProbeVerdict::kInconclusive;
  }
  return out;
}

}  // namespace jetext
