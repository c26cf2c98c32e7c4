#include "iceo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iceo {

void OracleConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("OracleConfig: rho must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("OracleConfig: tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("OracleConfig: max_iters must be >= 1");
}

namespace {

// One coordinate of the newsvendor Lagrangian:
//   min_{t >= 0} sum_k p_k [h (t - xi_k)^+ + b (xi_k - t)^+] + rho/2 t^2 + mu t.
// Walks the sorted breakpoints; on each linear piece the objective is a
// quadratic whose stationary point is -(slope + mu)/rho.
double newsvendor_coordinate(const std::vector<std::pair<double, double>>& breaks, double h,
                             double b, double rho, double mu) {
  // breaks: (demand, probability) sorted by demand.
  double slope = 0.0;  // derivative of the piecewise-linear part right of t = 0
  std::size_t next = 0;
  for (const auto& [xi, pk] : breaks) {
    if (xi <= 0.0) {
      slope += pk * h;
      ++next;
    } else {
      slope -= pk * b;
    }
  }
  double lo = 0.0;
  while (true) {
    if (slope + rho * lo + mu >= 0.0) return lo;
    const double stationary = -(slope + mu) / rho;
    const double hi = next < breaks.size() ? breaks[next].first : std::numeric_limits<double>::infinity();
    if (stationary <= hi) return stationary;
    // Cross the breakpoint: demand moves from the stockout side to the holding side.
    const double pk = breaks[next].second;
    slope += pk * (h + b);
    lo = hi;
    ++next;
  }
}

OracleResult solve_newsvendor_exact(const ProblemInstance& problem, const ProbVector& p, double rho) {
  const auto& params = *problem.newsvendor_params();
  const int d = problem.dimension();
  const int K = problem.num_scenarios();
  std::vector<std::vector<std::pair<double, double>>> breaks(static_cast<std::size_t>(d));
  for (int l = 0; l < d; ++l) {
    auto& bl = breaks[l];
    for (int k = 0; k < K; ++k) {
      if (p[k] > 0.0) bl.emplace_back(problem.scenarios()[k][l], p[k]);
    }
    std::sort(bl.begin(), bl.end());
  }
  auto solve_at = [&](double mu) {
    Vector w(d);
    for (int l = 0; l < d; ++l) {
      w[l] = newsvendor_coordinate(breaks[l], params.holding[l], params.stockout[l], rho, mu);
    }
    return w;
  };

  OracleResult result;
  result.w = solve_at(0.0);
  if (result.w.sum() <= params.capacity) return result;

  // The budget binds: find mu > 0 with sum_l w_l(mu) = C. Each w_l(mu) is
  // continuous and nonincreasing; at mu = max_l b_l every w_l is zero.
  double mu_lo = 0.0;
  double mu_hi = params.stockout.maxCoeff() + 1.0;
  int iters = 0;
  while (iters < 200 && mu_hi - mu_lo > 1e-15 * std::max(1.0, mu_hi)) {
    const double mid = 0.5 * (mu_lo + mu_hi);
    if (solve_at(mid).sum() > params.capacity) {
      mu_lo = mid;
    } else {
      mu_hi = mid;
    }
    ++iters;
  }
  result.w = solve_at(mu_hi);
  result.iterations = iters;
  return result;
}

OracleResult solve_projected(const ProblemInstance& problem, const ProbVector& p,
                             const OracleConfig& cfg, const std::optional<Vector>& warm_start) {
  const auto& region = problem.region();
  const int d = problem.dimension();
  const int K = problem.num_scenarios();
  Vector w = warm_start ? region.project(*warm_start) : region.project(Vector::Zero(d));

  auto gradient = [&](const Vector& x) {
    Vector g = cfg.rho * problem.phi_gradient(x);
    for (int k = 0; k < K; ++k) {
      if (p[k] != 0.0) g += p[k] * problem.cost_and_subgradient(x, k).gradient;
    }
    return g;
  };

  OracleResult result;
  if (problem.smooth()) {
    const double step = 1.0 / (problem.gradient_lipschitz_bound() + cfg.rho);
    for (int t = 1; t <= cfg.max_iters; ++t) {
      Vector next = region.project(w - step * gradient(w));
      result.last_step = (next - w).norm();
      w = std::move(next);
      result.iterations = t;
      if (result.last_step <= cfg.tol) {
        result.w = std::move(w);
        return result;
      }
    }
  } else {
    // Strongly convex subgradient method with step 1/(rho t) and
    // t-weighted averaging of the iterates.
    Vector avg = w;
    double weight = 0.0;
    for (int t = 1; t <= cfg.max_iters; ++t) {
      w = region.project(w - gradient(w) / (cfg.rho * t));
      weight += t;
      Vector next_avg = avg + (static_cast<double>(t) / weight) * (w - avg);
      result.last_step = (next_avg - avg).norm();
      avg = std::move(next_avg);
      result.iterations = t;
      if (t > 1 && result.last_step <= cfg.tol) {
        result.w = std::move(avg);
        return result;
      }
    }
    w = std::move(avg);
  }
  result.w = std::move(w);
  result.converged = false;
  return result;
}

}  // namespace

OracleResult solve_regularized(const ProblemInstance& problem, const ProbVector& p,
                               const OracleConfig& cfg, const std::optional<Vector>& warm_start) {
  cfg.validate();
  if (p.size() != problem.num_scenarios()) {
    throw std::invalid_argument("solve_regularized: probability vector has wrong length");
  }
  if (cfg.method == OracleMethod::Auto && problem.kind() == ProblemKind::Newsvendor) {
    return solve_newsvendor_exact(problem, p, cfg.rho);
  }
  return solve_projected(problem, p, cfg, warm_start);
}

Vector regularized_solution(const ProblemInstance& problem, const ProbVector& p, const OracleConfig& cfg) {
  return solve_regularized(problem, p, cfg).w;
}

double regularized_objective(const ProblemInstance& problem, const ProbVector& p, const Vector& w,
                             double rho) {
  double value = rho * problem.phi(w);
  for (int k = 0; k < problem.num_scenarios(); ++k) {
    if (p[k] != 0.0) value += p[k] * problem.cost(w, k);
  }
  return value;
}

double expected_cost(const ProblemInstance& problem, const ProbVector& p, const Vector& w) {
  if (p.size() != problem.num_scenarios()) {
    throw std::invalid_argument("expected_cost: probability vector has wrong length");
  }
  if (!problem.region().contains(w, 1e-6)) {
    throw std::invalid_argument("expected_cost: decision is outside the feasible region");
  }
  return regularized_objective(problem, p, w, 0.0);
}

namespace {

// Calls visit(point) for each point of the lattice lo + step * i inside [lo, hi].
template <class Visit>
void for_each_lattice_point(const Vector& lo, const Vector& hi, double step, Visit&& visit) {
  const auto n = lo.size();
  std::vector<long> count(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    count[j] = static_cast<long>(std::floor((hi[j] - lo[j]) / step + 1e-9)) + 1;
  }
  std::vector<long> idx(static_cast<std::size_t>(n), 0);
  Vector x = lo;
  while (true) {
    visit(x);
    Eigen::Index j = 0;
    for (; j < n; ++j) {
      if (++idx[j] < count[j]) {
        x[j] = lo[j] + step * idx[j];
        break;
      }
      idx[j] = 0;
      x[j] = lo[j];
    }
    if (j == n) return;
  }
}

double lattice_size(const Vector& lo, const Vector& hi, double step) {
  double total = 1.0;
  for (Eigen::Index j = 0; j < lo.size(); ++j) total *= std::floor((hi[j] - lo[j]) / step + 1e-9) + 1.0;
  return total;
}

}  // namespace

Vector brute_force_solve(const ProblemInstance& problem, const ProbVector& p, double rho,
                         double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("brute_force_solve: grid_step must be positive");
  if (problem.dimension() > 3) throw std::invalid_argument("brute_force_solve: requires d <= 3");
  const auto& region = problem.region();
  double best = std::numeric_limits<double>::infinity();
  Vector best_w;
  auto consider = [&](const Vector& w) {
    const double v = regularized_objective(problem, p, w, rho);
    if (v < best) {
      best = v;
      best_w = w;
    }
  };

  if (const auto* flow = region.flow()) {
    // Grid over coordinates of the null space of A; keep points inside the box.
    Eigen::FullPivLU<Matrix> lu(flow->incidence);
    Matrix basis = lu.kernel();
    if (basis.cols() == 0 || (basis.cols() == 1 && basis.norm() == 0.0)) {
      throw std::invalid_argument("brute_force_solve: flow region has no circulation space");
    }
    Eigen::HouseholderQR<Matrix> qr(basis);
    const Matrix q = qr.householderQ() * Matrix::Identity(basis.rows(), basis.cols());
    const double radius = flow->lower.cwiseAbs().cwiseMax(flow->upper.cwiseAbs()).norm();
    const Vector lo = Vector::Constant(q.cols(), -radius);
    const Vector hi = Vector::Constant(q.cols(), radius);
    if (lattice_size(lo, hi, grid_step) > 1e8) throw std::invalid_argument("brute_force_solve: grid too large");
    for_each_lattice_point(lo, hi, grid_step, [&](const Vector& t) {
      const Vector w = q * t;
      if ((w - flow->lower).minCoeff() >= -1e-12 && (flow->upper - w).minCoeff() >= -1e-12) consider(w);
    });
  } else if (const auto* port = region.portfolio()) {
    // Lattice over the first (assets - 1) weights; the last weight closes the simplex.
    const int a = port->assets;
    Vector lo = Vector::Zero(a);
    Vector hi = Vector::Ones(a);
    hi[a - 1] = port->return_bound;
    if (lattice_size(lo, hi, grid_step) > 1e8) throw std::invalid_argument("brute_force_solve: grid too large");
    for_each_lattice_point(lo, hi, grid_step, [&](const Vector& t) {
      const double partial = t.head(a - 1).sum();
      if (partial > 1.0 + 1e-12) return;
      Vector w(a + 1);
      w.head(a - 1) = t.head(a - 1);
      w[a - 1] = std::max(0.0, 1.0 - partial);
      w[a] = t[a - 1];
      consider(w);
    });
  } else {
    const auto [lo, hi] = region.bounding_box();
    if (lattice_size(lo, hi, grid_step) > 1e8) throw std::invalid_argument("brute_force_solve: grid too large");
    for_each_lattice_point(lo, hi, grid_step, [&](const Vector& w) {
      if (region.contains(w, 1e-9)) consider(w);
    });
  }
  if (best_w.size() == 0) throw std::runtime_error("brute_force_solve: no feasible grid point");
  return best_w;
}

double estimate_cost_lipschitz(const ProblemInstance& problem, int num_pairs, std::uint64_t seed) {
  const auto& region = problem.region();
  const auto [lo, hi] = region.bounding_box();
  const Vector span = hi - lo;
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_point = [&] {
    Vector y(lo.size());
    for (Eigen::Index j = 0; j < y.size(); ++j) y[j] = lo[j] + span[j] * unif(rng);
    return region.project(y);
  };
  double best = 0.0;
  for (int i = 0; i < num_pairs; ++i) {
    const Vector w1 = random_point();
    Vector w2;
    if (i % 2 == 0) {
      w2 = random_point();
    } else {
      Vector dir(w1.size());
      for (Eigen::Index j = 0; j < dir.size(); ++j) dir[j] = normal(rng);
      w2 = region.project(w1 + 1e-3 * span.norm() * dir / dir.norm());
    }
    const double dw = (w1 - w2).norm();
    if (dw < 1e-12) continue;
    best = std::max(best, (problem.cost_vector(w1) - problem.cost_vector(w2)).norm() / dw);
  }
  return best;
}

}  // namespace iceo
