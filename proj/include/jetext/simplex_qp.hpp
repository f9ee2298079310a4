#pragma once

// Concave quadratic maximization over the probability simplex:
//
//   maximize  Phi(lambda) = <c, lambda> - (eps/2) |V lambda|^2
//   s.t.      lambda >= 0, sum(lambda) = 1
//
// Each pointwise sup-inf convolution of a max-of-affine function reduces to
// one such problem, with one vertex per site.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace jetext {

class SimplexQuadraticProblem {
 public:
  /// `columns` holds the m vertex vectors of length `dim` back to back
  /// (column-major n x m). Throws std::invalid_argument on bad shapes,
  /// non-finite entries, or eps <= 0.
  SimplexQuadraticProblem(std::vector<double> c, std::size_t dim, std::vector<double> columns,
                          double eps);

  std::size_t size() const { return c_.size(); }
  std::size_t dim() const { return dim_; }
  double eps() const { return eps_; }
  const std::vector<double>& c() const { return c_; }
  const double* column(std::size_t i) const { return columns_.data() + i * dim_; }

  /// Phi(lambda); also writes V lambda into `w` when given.
  double objective(const std::vector<double>& lambda, std::vector<double>* w = nullptr) const;
  /// Gradient of Phi at lambda.
  std::vector<double> gradient(const std::vector<double>& lambda) const;
  /// Frank-Wolfe gap max_i grad_i - <grad, lambda>.
  double linearization_gap(const std::vector<double>& lambda) const;

 private:
  std::vector<double> c_;
  std::size_t dim_;
  std::vector<double> columns_;
  double eps_;
};

struct SimplexSolution {
  std::vector<double> lambda;
  double value = 0.0;
  double gap = 0.0;
  std::size_t iterations = 0;
};

struct SimplexSolveOptions {
  /// Gap tolerance; defaults to 1e-10 (1 + |c|_inf).
  std::optional<double> tol;
  /// Frank-Wolfe iteration budget; defaults to 50 m + 2000.
  std::optional<std::size_t> max_iterations;
  /// Finish with an active-set pass that solves the optimality system on
  /// the support exactly. Needed for gradient accuracy near machine
  /// precision; the gap contract holds either way.
  bool polish = true;
};

/// Thrown when the gap contract cannot be met; carries the best iterate.
class SimplexSolveError : public std::runtime_error {
 public:
  SimplexSolveError(const std::string& what, SimplexSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SimplexSolution& best() const { return best_; }

 private:
  SimplexSolution best_;
};

double default_tolerance(const SimplexQuadraticProblem& problem);

/// Away-step Frank-Wolfe with exact line search, optionally followed by the
/// active-set polish. Vertex ties go to the lowest index.
SimplexSolution solve(const SimplexQuadraticProblem& problem, const SimplexSolveOptions& options = {});

}  // namespace jetext
