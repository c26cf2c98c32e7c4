#include "iceo/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace iceo {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Numerical: return "numerical";
  }
  return "unknown";
}

void LinearProgram::validate() const {
  const auto m = constraints.rows();
  if (static_cast<Eigen::Index>(senses.size()) != m || rhs.size() != m) {
    throw std::invalid_argument("LinearProgram: row count mismatch");
  }
  if (static_cast<int>(nonnegative.size()) != num_vars()) {
    throw std::invalid_argument("LinearProgram: variable sign vector has the wrong length");
  }
  if (objective.size() != 0 && objective.size() != num_vars()) {
    throw std::invalid_argument("LinearProgram: objective has the wrong length");
  }
  if (!constraints.allFinite() || !rhs.allFinite() || !objective.allFinite()) {
    throw std::invalid_argument("LinearProgram: non-finite coefficient");
  }
}

namespace {

// Tableau in canonical form: rows 0..m-1 are constraints, last column is rhs.
struct Tableau {
  Matrix t;
  std::vector<int> basis;
  int cols = 0;  // number of structural columns (excluding rhs)

  double& rhs(int r) { return t(r, cols); }

  void pivot(int r, int c) {
    t.row(r) /= t(r, c);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
    }
    basis[static_cast<std::size_t>(r)] = c;
  }
};

enum class PhaseOutcome { Optimal, Unbounded, IterationLimit };

// Minimizes the cost row (last row of t) over columns with allowed[j].
PhaseOutcome run_simplex(Tableau& tab, const std::vector<bool>& allowed, const LpOptions& opts, int& iters) {
  const int m = static_cast<int>(tab.basis.size());
  const int obj = m;
  while (iters < opts.max_iters) {
    int enter = -1;
    for (int j = 0; j < tab.cols; ++j) {
      if (allowed[static_cast<std::size_t>(j)] && tab.t(obj, j) < -opts.pivot_tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return PhaseOutcome::Optimal;
    int leave = -1;
    double best = 0.0;
    for (int r = 0; r < m; ++r) {
      const double a = tab.t(r, enter);
      if (a > opts.pivot_tol) {
        const double ratio = tab.rhs(r) / a;
        if (leave < 0 || ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && tab.basis[static_cast<std::size_t>(r)] <
                                                    tab.basis[static_cast<std::size_t>(leave)])) {
          leave = r;
          best = ratio;
        }
      }
    }
    if (leave < 0) return PhaseOutcome::Unbounded;
    tab.pivot(leave, enter);
    ++iters;
  }
  return PhaseOutcome::IterationLimit;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpOptions& opts) {
  lp.validate();
  const int m = static_cast<int>(lp.constraints.rows());
  const int n = lp.num_vars();

  // Column map: free variables are split into x+ and x-, then slack/surplus, then artificials.
  std::vector<int> pos_col(static_cast<std::size_t>(n)), neg_col(static_cast<std::size_t>(n), -1);
  int cols = 0;
  for (int j = 0; j < n; ++j) {
    pos_col[static_cast<std::size_t>(j)] = cols++;
    if (!lp.nonnegative[static_cast<std::size_t>(j)]) neg_col[static_cast<std::size_t>(j)] = cols++;
  }
  std::vector<int> slack_col(static_cast<std::size_t>(m), -1);
  for (int r = 0; r < m; ++r) {
    if (lp.senses[static_cast<std::size_t>(r)] != Sense::Eq) slack_col[static_cast<std::size_t>(r)] = cols++;
  }
  const int first_art = cols;
  cols += m;

  Tableau tab;
  tab.cols = cols;
  tab.t = Matrix::Zero(m + 1, cols + 1);
  tab.basis.resize(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    const double sign = lp.rhs[r] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      const double a = sign * lp.constraints(r, j);
      tab.t(r, pos_col[static_cast<std::size_t>(j)]) = a;
      if (neg_col[static_cast<std::size_t>(j)] >= 0) tab.t(r, neg_col[static_cast<std::size_t>(j)]) = -a;
    }
    const Sense s = lp.senses[static_cast<std::size_t>(r)];
    if (s == Sense::Le) tab.t(r, slack_col[static_cast<std::size_t>(r)]) = sign;
    if (s == Sense::Ge) tab.t(r, slack_col[static_cast<std::size_t>(r)]) = -sign;
    tab.t(r, first_art + r) = 1.0;
    tab.rhs(r) = sign * lp.rhs[r];
    tab.basis[static_cast<std::size_t>(r)] = first_art + r;
  }
  // Phase 1 cost: sum of artificials, expressed in reduced form.
  for (int r = 0; r < m; ++r) tab.t.row(m) -= tab.t.row(r);
  for (int r = 0; r < m; ++r) tab.t(m, first_art + r) = 0.0;

  LpResult res;
  std::vector<bool> allowed(static_cast<std::size_t>(cols), true);
  if (run_simplex(tab, allowed, opts, res.iterations) == PhaseOutcome::IterationLimit) {
    res.status = LpStatus::Numerical;
    return res;
  }
  if (!tab.t.allFinite()) {
    res.status = LpStatus::Numerical;
    return res;
  }
  const double scale = 1.0 + lp.rhs.cwiseAbs().maxCoeff();
  if (-tab.t(m, cols) > opts.feasibility_tol * scale) {
    res.status = LpStatus::Infeasible;
    return res;
  }

  // Drive remaining artificials out of the basis; rows that cannot pivot are redundant.
  for (int r = 0; r < m; ++r) {
    if (tab.basis[static_cast<std::size_t>(r)] < first_art) continue;
    for (int j = 0; j < first_art; ++j) {
      if (std::abs(tab.t(r, j)) > 1e-8) {
        tab.pivot(r, j);
        break;
      }
    }
  }
  for (int j = first_art; j < cols; ++j) allowed[static_cast<std::size_t>(j)] = false;

  if (lp.objective.size() != 0) {
    tab.t.row(m).setZero();
    for (int j = 0; j < n; ++j) {
      tab.t(m, pos_col[static_cast<std::size_t>(j)]) = lp.objective[j];
      if (neg_col[static_cast<std::size_t>(j)] >= 0) tab.t(m, neg_col[static_cast<std::size_t>(j)]) = -lp.objective[j];
    }
    for (int r = 0; r < m; ++r) {
      const int b = tab.basis[static_cast<std::size_t>(r)];
      if (b < first_art && tab.t(m, b) != 0.0) tab.t.row(m) -= tab.t(m, b) * tab.t.row(r);
    }
    const PhaseOutcome out = run_simplex(tab, allowed, opts, res.iterations);
    if (out == PhaseOutcome::IterationLimit || !tab.t.allFinite()) {
      res.status = LpStatus::Numerical;
      return res;
    }
    if (out == PhaseOutcome::Unbounded) {
      res.status = LpStatus::Unbounded;
      return res;
    }
  }

  Vector raw = Vector::Zero(cols);
  for (int r = 0; r < m; ++r) raw[tab.basis[static_cast<std::size_t>(r)]] = tab.rhs(r);
  res.x.resize(n);
  for (int j = 0; j < n; ++j) {
    res.x[j] = raw[pos_col[static_cast<std::size_t>(j)]];
    if (neg_col[static_cast<std::size_t>(j)] >= 0) res.x[j] -= raw[neg_col[static_cast<std::size_t>(j)]];
  }
  res.objective = lp.objective.size() != 0 ? lp.objective.dot(res.x) : 0.0;
  res.status = LpStatus::Optimal;
  return res;
}

}  // namespace iceo
