#pragma once

// Numerical demonstrator: with the Hölder kernel |y - x|^{1+theta} /
// ((1+theta) eps^theta), theta < 1, the sup-then-inf convolution of
//
//   q(x) = v x + M/(1+theta) |x|^{1+theta}
//
// no longer reproduces q at the origin: (q^eps)_eps(0) > 0 = q(0).
// Two independent witnesses are provided: a brute-force grid convolution
// and the one-parameter probe y = lambda * y_bar.

#include <cstddef>
#include <optional>
#include <string_view>

#include "jetext/exec.hpp"

namespace jetext {

struct HolderProbeConfig {
  double theta = 0.5;
  double M = 1.0;
  double v = 1.0;
  double eps = 0.5;
  /// Grid half-width; empty selects 4 max(|y_bar|, eps |v|^{1/theta}, 1).
  std::optional<double> grid_halfwidth;
  std::size_t grid_points = 10000;
};

/// Throws std::invalid_argument unless theta in (0, 1], M > 0, v != 0,
/// eps > 0, M eps^theta < 1 and grid_points >= 1000.
void validate(const HolderProbeConfig& cfg);

double q_theta(const HolderProbeConfig& cfg, double x);

/// Kernel |d|^{1+theta} / ((1+theta) eps^theta).
double holder_kernel(const HolderProbeConfig& cfg, double d);

/// y_bar = -eps v |v|^{1/theta - 1}.
double probe_y_bar(const HolderProbeConfig& cfg);

/// |y_bar|^{1+theta} / ((1+theta) eps^theta): the positive factor in front of psi.
double probe_prefactor(const HolderProbeConfig& cfg);

/// psi(lambda) = M eps^theta lambda^{1+theta} - (1+theta) lambda - |1 - lambda|^{1+theta} + 1.
double lambda_probe(const HolderProbeConfig& cfg, double lambda);

struct LambdaProbeResult {
  double lambda_star = 0.0;
  double psi_star = 0.0;
  double y_bar = 0.0;
};

/// Scans lambda over a logarithmic grid in (0, 1/2]. Requires theta < 1;
/// throws std::runtime_error if no lambda gives psi > 0.
LambdaProbeResult find_positive_lambda(const HolderProbeConfig& cfg);

enum class ProbeVerdict { kPositive, kInconclusive, kZero };

std::string_view to_string(ProbeVerdict verdict);

struct GridProbeResult {
  /// Grid value of (q^eps)_eps(0).
  double value = 0.0;
  /// max of (upper_value - value) and |value - value on the every-other-node
  /// subgrid|, floored at round-off.
  double error_estimate = 0.0;
  /// Inner sup at z_star maximized over continuous y; bounds the true value
  /// from above, while `value` sits at or below it.
  double upper_value = 0.0;
  double coarse_value = 0.0;
  double z_star = 0.0;
  double halfwidth = 0.0;
  double step = 0.0;
  /// Node count actually used: grid_points rounded up to odd.
  std::size_t nodes = 0;
  ProbeVerdict verdict = ProbeVerdict::kInconclusive;
};

/// Brute-force (q^eps)_eps(0) on a uniform grid over [-H, H] that contains 0:
/// q^eps(z_j) = max_i q(y_i) - k(y_i - z_j), then min_j q^eps(z_j) + k(z_j),
/// with the minimizing z polished over its two neighbouring cells.
/// [value, upper_value] brackets the true value up to local-search failure.
/// Verdict is positive when value > 3 error_estimate; zero when theta = 1
/// and |value| <= 3 error_estimate; inconclusive otherwise.
GridProbeResult grid_sup_inf_conv(const HolderProbeConfig& cfg, Exec exec = Exec::kParallel);

}  // namespace jetext
