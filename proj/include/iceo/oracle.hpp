#pragma once

#include <optional>

#include "iceo/problems.hpp"

namespace iceo {

enum class OracleMethod {
  /// Exact separable solver for newsvendor instances, projected gradient otherwise.
  Auto,
  /// Projected subgradient (averaged, step 1/(rho t)) or fixed-step projected gradient.
  ProjectedGradient,
};

struct OracleConfig {
  double rho = 0.01;
  double tol = 1e-8;
  int max_iters = 50000;
  OracleMethod method = OracleMethod::Auto;

  void validate() const;
};

struct OracleResult {
  Vector w;
  bool converged = true;
  int iterations = 0;
  /// Norm of the last iterate change; meaningful when converged is false.
  double last_step = 0.0;
};

/// argmin_{w in S} sum_k p_k c_k(w) + rho phi(w).
OracleResult solve_regularized(const ProblemInstance& problem, const ProbVector& p,
                               const OracleConfig& cfg,
                               const std::optional<Vector>& warm_start = std::nullopt);

/// Convenience: the minimizer only.
Vector regularized_solution(const ProblemInstance& problem, const ProbVector& p, const OracleConfig& cfg);

/// sum_k p_k c_k(w); rejects w outside the feasible region (tolerance 1e-6).
double expected_cost(const ProblemInstance& problem, const ProbVector& p, const Vector& w);

/// sum_k p_k c_k(w) + rho phi(w), with no feasibility check.
double regularized_objective(const ProblemInstance& problem, const ProbVector& p, const Vector& w,
                             double rho);

/// Exhaustive minimizer of the regularized objective over a feasible grid.
/// Requires d <= 3 and at most 1e8 grid points.
Vector brute_force_solve(const ProblemInstance& problem, const ProbVector& p, double rho,
                         double grid_step);

/// Empirical Lipschitz constant of w -> (c_1(w), ..., c_K(w)) in the 2-norm,
/// estimated over random pairs (far and nearby) of feasible points.
double estimate_cost_lipschitz(const ProblemInstance& problem, int num_pairs, std::uint64_t seed);

}  // namespace iceo
