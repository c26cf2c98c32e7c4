#pragma once

#include <string>
#include <vector>

#include "iceo/simplex.hpp"

namespace iceo {

enum class LpStatus { Optimal, Infeasible, Unbounded, Numerical };
std::string to_string(LpStatus s);

enum class Sense { Le, Ge, Eq };

/// min c^T x  s.t.  rows (sense) rhs, with each variable either free or x >= 0.
struct LinearProgram {
  Matrix constraints;  // rows x num_vars
  std::vector<Sense> senses;
  Vector rhs;
  Vector objective;  // empty means a pure feasibility problem
  std::vector<bool> nonnegative;

  int num_vars() const { return static_cast<int>(constraints.cols()); }
  void validate() const;
};

struct LpResult {
  LpStatus status = LpStatus::Numerical;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-10;
  int max_iters = 200000;
};

/// Dense two-phase tableau simplex with Bland's rule.
LpResult solve_lp(const LinearProgram& lp, const LpOptions& opts = {});

}  // namespace iceo
