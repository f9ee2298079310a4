#include "jetext/simplex_qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace jetext {

SimplexQuadraticProblem::SimplexQuadraticProblem(std::vector<double> c, std::size_t dim,
                                                 std::vector<double> columns, double eps)
    : c_(std::move(c)), dim_(dim), columns_(std::move(columns)), eps_(eps) {
  if (c_.empty()) throw std::invalid_argument("simplex problem needs at least one vertex");
  if (columns_.size() != c_.size() * dim_)
    throw std::invalid_argument("simplex problem: column block has wrong size");
  if (!(eps_ > 0.0) || !std::isfinite(eps_))
    throw std::invalid_argument("simplex problem: eps must be positive and finite");
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(c_.begin(), c_.end(), finite) ||
      !std::all_of(columns_.begin(), columns_.end(), finite))
    throw std::invalid_argument("simplex problem: non-finite data");
}

double SimplexQuadraticProblem::objective(const std::vector<double>& lambda,
                                          std::vector<double>* w_out) const {
  std::vector<double> w(dim_, 0.0);
  double lin = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (lambda[i] == 0.0) continue;
    lin += c_[i] * lambda[i];
    const double* col = column(i);
    for (std::size_t k = 0; k < dim_; ++k) w[k] += lambda[i] * col[k];
  }
  double w2 = 0.0;
  for (double x : w) w2 += x * x;
  if (w_out) *w_out = std::move(w);
  return lin - 0.5 * eps_ * w2;
}

std::vector<double> SimplexQuadraticProblem::gradient(const std::vector<double>& lambda) const {
  std::vector<double> w;
  objective(lambda, &w);
  std::vector<double> g(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const double* col = column(i);
    double vw = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) vw += col[k] * w[k];
    g[i] = c_[i] - eps_ * vw;
  }
  return g;
}

double SimplexQuadraticProblem::linearization_gap(const std::vector<double>& lambda) const {
  const auto g = gradient(lambda);
  double gl = 0.0;
  for (std::size_t i = 0; i < size(); ++i) gl += g[i] * lambda[i];
  const double gmax = *std::max_element(g.begin(), g.end());
  return std::max(0.0, gmax - gl);
}

double default_tolerance(const SimplexQuadraticProblem& problem) {
  double cmax = 0.0;
  for (double x : problem.c()) cmax = std::max(cmax, std::fabs(x));
  return 1e-10 * (1.0 + cmax);
}

namespace {

std::size_t argmax_lowest(const std::vector<double>& g) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g[i] > g[best]) best = i;
  return best;
}

void normalize(std::vector<double>& lambda) {
  double sum = 0.0;
  for (double& l : lambda) {
    if (l < 0.0) l = 0.0;
    sum += l;
  }
  for (double& l : lambda) l /= sum;
}

struct Iterate {
  std::vector<double> lambda;
  std::size_t iterations = 0;
};

Iterate frank_wolfe(const SimplexQuadraticProblem& p, double tol, std::size_t budget) {
  const std::size_t m = p.size();
  const std::size_t n = p.dim();
  const double eps = p.eps();

  std::vector<double> vertex_value(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* col = p.column(i);
    double v2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) v2 += col[k] * col[k];
    vertex_value[i] = p.c()[i] - 0.5 * eps * v2;
  }
  Iterate it;
  it.lambda.assign(m, 0.0);
  it.lambda[argmax_lowest(vertex_value)] = 1.0;

  std::vector<double> w(n), dir(n);
  for (; it.iterations < budget; ++it.iterations) {
    p.objective(it.lambda, &w);
    const auto g = p.gradient(it.lambda);
    double gl = 0.0;
    for (std::size_t i = 0; i < m; ++i) gl += g[i] * it.lambda[i];
    const std::size_t s = argmax_lowest(g);
    const double fw_slope = g[s] - gl;
    if (fw_slope <= tol) break;

    std::size_t a = m;
    for (std::size_t i = 0; i < m; ++i)
      if (it.lambda[i] > 0.0 && (a == m || g[i] < g[a])) a = i;
    const double away_slope = gl - g[a];

    const bool fw_step = fw_slope >= away_slope || it.lambda[a] >= 1.0;
    double slope, gamma_max;
    if (fw_step) {
      const double* vs = p.column(s);
      for (std::size_t k = 0; k < n; ++k) dir[k] = vs[k] - w[k];
      slope = fw_slope;
      gamma_max = 1.0;
    } else {
      const double* va = p.column(a);
      for (std::size_t k = 0; k < n; ++k) dir[k] = w[k] - va[k];
      slope = away_slope;
      gamma_max = it.lambda[a] / (1.0 - it.lambda[a]);
    }
    double curvature = 0.0;
    for (double d : dir) curvature += d * d;
    curvature *= eps;
    const double gamma = curvature > 0.0 ? std::min(slope / curvature, gamma_max) : gamma_max;
    if (!(gamma > 0.0)) break;

    if (fw_step) {
      for (double& l : it.lambda) l *= (1.0 - gamma);
      it.lambda[s] += gamma;
    } else {
      for (double& l : it.lambda) l *= (1.0 + gamma);
      it.lambda[a] -= gamma;
      if (gamma == gamma_max) it.lambda[a] = 0.0;
    }
    normalize(it.lambda);
  }
  return it;
}

// Active-set refinement in the manner of Wolfe's minimum-norm-point method:
// maximize Phi on the affine hull of the current support, step back to the
// simplex when that maximizer leaves it, and admit the best outside vertex
// once the support is optimal on its own hull.
Iterate polish(const SimplexQuadraticProblem& p, std::vector<double> lambda, double tol,
               std::size_t budget) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const std::size_t m = p.size();
  const std::size_t n = p.dim();
  const double eps = p.eps();

  Iterate it{std::move(lambda), 0};
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < m; ++i)
    if (it.lambda[i] > 0.0) support.push_back(i);

  auto drop_blocking = [&](const VectorXd& step, double t_block, std::size_t blocking) {
    for (std::size_t a = 0; a < support.size(); ++a)
      it.lambda[support[a]] += t_block * step[static_cast<Eigen::Index>(a)];
    it.lambda[support[blocking]] = 0.0;
    normalize(it.lambda);
    std::erase_if(support, [&](std::size_t i) { return it.lambda[i] <= 0.0; });
  };

  // Largest step along `step` that keeps the support nonnegative.
  auto ratio_test = [&](const VectorXd& step, double& t_block, std::size_t& blocking) {
    t_block = std::numeric_limits<double>::infinity();
    blocking = support.size();
    for (std::size_t a = 0; a < support.size(); ++a) {
      const double d = step[static_cast<Eigen::Index>(a)];
      if (d < 0.0) {
        const double t = it.lambda[support[a]] / -d;
        if (t < t_block) {
          t_block = t;
          blocking = a;
        }
      }
    }
  };

  for (; it.iterations < budget; ++it.iterations) {
    const auto k = static_cast<Eigen::Index>(support.size());
    const auto nn = static_cast<Eigen::Index>(n);
    const auto g_full = p.gradient(it.lambda);
    MatrixXd Vk(nn, k);
    VectorXd gA(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const double* col = p.column(support[static_cast<std::size_t>(a)]);
      for (Eigen::Index r = 0; r < nn; ++r) Vk(r, a) = col[r];
      gA[a] = g_full[support[static_cast<std::size_t>(a)]];
    }

    // Directions with V d = 0 and sum(d) = 0 leave the quadratic part flat.
    MatrixXd B(nn + 1, k);
    B.topRows(nn) = Vk;
    B.row(nn).setOnes();
    Eigen::JacobiSVD<MatrixXd> svd(B, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index r = 0; r < sv.size(); ++r)
      if (sv[r] > 1e-12 * std::max(1.0, smax) * static_cast<double>(std::max(nn + 1, k))) ++rank;
    if (rank < k) {
      const MatrixXd N = svd.matrixV().rightCols(k - rank);
      const VectorXd d = N * (N.transpose() * gA);
      double t_block;
      std::size_t blocking;
      ratio_test(d, t_block, blocking);
      if (blocking < support.size() && t_block * gA.dot(d) > tol) {
        drop_blocking(d, t_block, blocking);
        continue;
      }
    }

    MatrixXd K = MatrixXd::Zero(k + 1, k + 1);
    K.topLeftCorner(k, k) = eps * (Vk.transpose() * Vk);
    K.topRightCorner(k, 1).setOnes();
    K.bottomLeftCorner(1, k).setOnes();
    VectorXd rhs = VectorXd::Zero(k + 1);
    rhs.head(k) = gA;
    const VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
    const VectorXd delta = sol.head(k);

    double t_block;
    std::size_t blocking;
    ratio_test(delta, t_block, blocking);
    if (blocking < support.size() && t_block < 1.0) {
      drop_blocking(delta, t_block, blocking);
      continue;
    }
    for (Eigen::Index a = 0; a < k; ++a) it.lambda[support[static_cast<std::size_t>(a)]] += delta[a];
    normalize(it.lambda);
    std::erase_if(support, [&](std::size_t i) { return it.lambda[i] <= 0.0; });

    const auto g = p.gradient(it.lambda);
    double gl = 0.0;
    for (std::size_t i = 0; i < m; ++i) gl += g[i] * it.lambda[i];
    const std::size_t j = argmax_lowest(g);
    if (g[j] - gl <= tol) break;
    if (std::find(support.begin(), support.end(), j) != support.end()) break;
    support.push_back(j);
    std::sort(support.begin(), support.end());
  }
  return it;
}

}  // namespace

SimplexSolution solve(const SimplexQuadraticProblem& problem, const SimplexSolveOptions& options) {
  const std::size_t m = problem.size();
  const double tol = options.tol.value_or(default_tolerance(problem));
  if (!(tol > 0.0)) throw std::invalid_argument("simplex solve: tolerance must be positive");
  const std::size_t budget = options.max_iterations.value_or(50 * m + 2000);

  auto finish = [&](Iterate it) {
    SimplexSolution sol;
    sol.value = problem.objective(it.lambda);
    sol.gap = problem.linearization_gap(it.lambda);
    sol.lambda = std::move(it.lambda);
    sol.iterations = it.iterations;
    return sol;
  };

  SimplexSolution best = finish(frank_wolfe(problem, tol, budget));
  if (options.polish && m > 1) {
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      double v2 = 0.0;
      for (std::size_t k = 0; k < problem.dim(); ++k) v2 += problem.column(i)[k] * problem.column(i)[k];
      scale = std::max({scale, std::fabs(problem.c()[i]), problem.eps() * v2});
    }
    const double tight = 32.0 * std::numeric_limits<double>::epsilon() * scale;
    SimplexSolution refined = finish(polish(problem, best.lambda, tight, 4 * m + 50));
    refined.iterations += best.iterations;
    if (refined.gap <= best.gap) best = std::move(refined);
  }
  if (best.gap > tol) {
    throw SimplexSolveError("simplex solve: gap " + std::to_string(best.gap) +
                                " above tolerance " + std::to_string(tol),
                            std::move(best));
  }
  return best;
}

}  // namespace jetext
