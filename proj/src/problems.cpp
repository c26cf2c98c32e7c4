#include "iceo/problems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace iceo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(const Vector& w, Eigen::Index d, const char* what) {
  if (w.size() != d) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                std::to_string(w.size()) + ", expected " + std::to_string(d) + ")");
  }
}

Vector project_flow(const FlowPolytopeRegion& r, const Vector& y) {
  // Dykstra's alternating projections between null(A) and the box.
  Vector x = y;
  Vector p = Vector::Zero(y.size());
  Vector q = Vector::Zero(y.size());
  for (int sweep = 0; sweep < r.max_sweeps; ++sweep) {
    const Vector prev = x;
    const Vector a = r.null_projector * (x + p);
    p = x + p - a;
    const Vector b = (a + q).cwiseMax(r.lower).cwiseMin(r.upper);
    q = a + q - b;
    x = b;
    if ((x - prev).norm() < r.sweep_tol && (r.incidence * x).norm() < 1e-8) return x;
  }
  throw ProjectionError("flow-polytope projection did not converge in " +
                        std::to_string(r.max_sweeps) +
                        " Dykstra sweeps; region may be empty or ill-conditioned");
}

}  // namespace

Vector project_onto_simplex(const Vector& y, double total) {
  const auto n = y.size();
  std::vector<double> u(y.data(), y.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += u[j];
    const double t = (cumulative - total) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (y.array() - theta).cwiseMax(0.0).matrix();
}

Vector project_onto_capped_simplex(const Vector& y, double capacity) {
  Vector clipped = y.cwiseMax(0.0);
  if (clipped.sum() <= capacity) return clipped;
  return project_onto_simplex(y, capacity);
}

FeasibleRegion::FeasibleRegion(BudgetSimplexRegion r) : region_(r) {
  if (r.dim < 1 || !(r.capacity > 0.0)) throw std::invalid_argument("budget region: bad parameters");
}

FeasibleRegion::FeasibleRegion(PortfolioBoxRegion r) : region_(r) {
  if (r.assets < 1 || r.return_bound < 0.0) {
    throw std::invalid_argument("portfolio region: bad parameters");
  }
}

FeasibleRegion::FeasibleRegion(FlowPolytopeRegion r) {
  const auto d = r.incidence.cols();
  if (d < 1 || r.lower.size() != d || r.upper.size() != d) {
    throw std::invalid_argument("flow region: inconsistent dimensions");
  }
  if ((r.lower.array() > r.upper.array()).any()) {
    throw std::invalid_argument("flow region: lower bound exceeds upper bound");
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(r.incidence);
  r.null_projector = Matrix::Identity(d, d) - cod.pseudoInverse() * r.incidence;
  region_ = std::move(r);
}

RegionKind FeasibleRegion::kind() const {
  return std::visit(overloaded{[](const BudgetSimplexRegion&) { return RegionKind::BudgetSimplex; },
                               [](const PortfolioBoxRegion&) { return RegionKind::PortfolioBox; },
                               [](const FlowPolytopeRegion&) { return RegionKind::FlowPolytope; }},
                    region_);
}

int FeasibleRegion::dimension() const {
  return std::visit(overloaded{[](const BudgetSimplexRegion& r) { return r.dim; },
                               [](const PortfolioBoxRegion& r) { return r.assets + 1; },
                               [](const FlowPolytopeRegion& r) {
                                 return static_cast<int>(r.incidence.cols());
                               }},
                    region_);
}

bool FeasibleRegion::contains(const Vector& w, double tol) const {
  if (w.size() != dimension() || !w.allFinite()) return false;
  return std::visit(
      overloaded{
          [&](const BudgetSimplexRegion& r) {
            return w.minCoeff() >= -tol && w.sum() <= r.capacity + tol;
          },
          [&](const PortfolioBoxRegion& r) {
            const auto x = w.head(r.assets);
            const double w0 = w[r.assets];
            return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol && w0 >= -tol &&
                   w0 <= r.return_bound + tol;
          },
          [&](const FlowPolytopeRegion& r) {
            return (w - r.lower).minCoeff() >= -tol && (r.upper - w).minCoeff() >= -tol &&
                   (r.incidence * w).cwiseAbs().maxCoeff() <= tol;
          }},
      region_);
}

Vector FeasibleRegion::project(const Vector& y) const {
  check_dim(y, dimension(), "project");
  if (!y.allFinite()) throw std::invalid_argument("project: non-finite input");
  return std::visit(
      overloaded{[&](const BudgetSimplexRegion& r) { return project_onto_capped_simplex(y, r.capacity); },
                 [&](const PortfolioBoxRegion& r) {
                   Vector out(y.size());
                   out.head(r.assets) = project_onto_simplex(y.head(r.assets), 1.0);
                   out[r.assets] = std::clamp(y[r.assets], 0.0, r.return_bound);
                   return out;
                 },
                 [&](const FlowPolytopeRegion& r) { return project_flow(r, y); }},
      region_);
}

double FeasibleRegion::diameter() const {
  return std::visit(
      overloaded{[](const BudgetSimplexRegion& r) {
                   return r.dim == 1 ? r.capacity : r.capacity * std::sqrt(2.0);
                 },
                 [](const PortfolioBoxRegion& r) {
                   const double simplex = r.assets == 1 ? 0.0 : std::sqrt(2.0);
                   return std::hypot(simplex, r.return_bound);
                 },
                 [](const FlowPolytopeRegion& r) { return (r.upper - r.lower).norm(); }},
      region_);
}

std::pair<Vector, Vector> FeasibleRegion::bounding_box() const {
  return std::visit(
      overloaded{[](const BudgetSimplexRegion& r) {
                   return std::pair{Vector::Zero(r.dim).eval(), Vector::Constant(r.dim, r.capacity).eval()};
                 },
                 [](const PortfolioBoxRegion& r) {
                   Vector hi = Vector::Ones(r.assets + 1);
                   hi[r.assets] = r.return_bound;
                   return std::pair{Vector::Zero(r.assets + 1).eval(), hi};
                 },
                 [](const FlowPolytopeRegion& r) { return std::pair{r.lower, r.upper}; }},
      region_);
}

CostEval newsvendor_cost(const NewsvendorParams& params, const Vector& w, const Vector& xi) {
  const auto d = params.holding.size();
  check_dim(w, d, "newsvendor_cost");
  check_dim(xi, d, "newsvendor_cost (scenario)");
  CostEval out{0.0, Vector::Zero(d)};
  for (Eigen::Index l = 0; l < d; ++l) {
    const double gap = w[l] - xi[l];
    if (gap > 0.0) {
      out.value += params.holding[l] * gap;
      out.gradient[l] = params.holding[l];
    } else if (gap < 0.0) {
      out.value -= params.stockout[l] * gap;
      out.gradient[l] = -params.stockout[l];
    }
  }
  return out;
}

CostEval portfolio_cost(const PortfolioParams& params, const Vector& decision, const Vector& xi) {
  const auto d = xi.size();
  check_dim(decision, d + 1, "portfolio_cost");
  const auto w = decision.head(d);
  const double w0 = decision[d];
  const double ret = w.dot(xi);
  const double dev = ret - w0;
  CostEval out{params.alpha * dev * dev - ret, Vector(d + 1)};
  out.gradient.head(d) = (2.0 * params.alpha * dev - 1.0) * xi;
  out.gradient[d] = -2.0 * params.alpha * dev;
  return out;
}

CostEval flow_cost(const FlowParams& params, const Vector& w, const Vector& xi) {
  const auto d = params.target.size();
  check_dim(w, d, "flow_cost");
  check_dim(xi, d, "flow_cost (scenario)");
  if (xi.minCoeff() < 0.0) throw std::invalid_argument("flow_cost: negative scenario weight");
  const Vector diff = w - params.target;
  return {xi.dot(diff.cwiseAbs2()), (2.0 * xi.array() * diff.array()).matrix()};
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Newsvendor: return "newsvendor";
    case ProblemKind::Portfolio: return "portfolio";
    case ProblemKind::Flow: return "flow";
  }
  return "unknown";
}

ProblemInstance::ProblemInstance(ProblemKind kind, ScenarioSet scenarios, FeasibleRegion region,
                                 std::variant<NewsvendorParams, PortfolioParams, FlowParams> params)
    : kind_(kind), scenarios_(std::move(scenarios)), region_(std::move(region)), params_(std::move(params)) {}

ProblemInstance ProblemInstance::newsvendor(ScenarioSet scenarios, Vector holding, Vector stockout,
                                            double capacity) {
  const int d = scenarios.dimension();
  if (holding.size() != d || stockout.size() != d) {
    throw std::invalid_argument("newsvendor: cost vectors must match the demand dimension");
  }
  if (holding.minCoeff() <= 0.0 || stockout.minCoeff() <= 0.0) {
    throw std::invalid_argument("newsvendor: holding and stockout costs must be positive");
  }
  FeasibleRegion region(BudgetSimplexRegion{d, capacity});
  return ProblemInstance(ProblemKind::Newsvendor, std::move(scenarios), std::move(region),
                         NewsvendorParams{std::move(holding), std::move(stockout), capacity});
}

ProblemInstance ProblemInstance::portfolio(ScenarioSet scenarios, double alpha,
                                           std::optional<double> return_bound) {
  if (!(alpha > 0.0)) throw std::invalid_argument("portfolio: alpha must be positive");
  const double bound = return_bound.value_or(scenarios.max_abs());
  FeasibleRegion region(PortfolioBoxRegion{scenarios.dimension(), bound});
  return ProblemInstance(ProblemKind::Portfolio, std::move(scenarios), std::move(region),
                         PortfolioParams{alpha});
}

ProblemInstance ProblemInstance::flow(ScenarioSet scenarios, Matrix incidence, Vector lower,
                                      Vector upper, Vector target) {
  if (incidence.cols() != scenarios.dimension() || target.size() != scenarios.dimension()) {
    throw std::invalid_argument("flow: edge count must match the scenario dimension");
  }
  for (const auto& z : scenarios.scenarios()) {
    if (z.minCoeff() < 0.0) throw std::invalid_argument("flow: scenario weights must be nonnegative");
  }
  FlowPolytopeRegion r;
  r.incidence = std::move(incidence);
  r.lower = std::move(lower);
  r.upper = std::move(upper);
  FeasibleRegion region(std::move(r));
  return ProblemInstance(ProblemKind::Flow, std::move(scenarios), std::move(region),
                         FlowParams{std::move(target)});
}

CostEval ProblemInstance::cost_and_subgradient(const Vector& w, int k) const {
  if (k < 0 || k >= num_scenarios()) throw std::out_of_range("scenario index out of range");
  const Vector& xi = scenarios_[k];
  return std::visit(overloaded{[&](const NewsvendorParams& p) { return newsvendor_cost(p, w, xi); },
                               [&](const PortfolioParams& p) { return portfolio_cost(p, w, xi); },
                               [&](const FlowParams& p) { return flow_cost(p, w, xi); }},
                    params_);
}

Vector ProblemInstance::cost_vector(const Vector& w) const {
  Vector c(num_scenarios());
  for (int k = 0; k < num_scenarios(); ++k) c[k] = cost(w, k);
  return c;
}

double ProblemInstance::gradient_lipschitz_bound() const {
  double bound = 0.0;
  for (const auto& z : scenarios_.scenarios()) {
    switch (kind_) {
      case ProblemKind::Portfolio:
        bound = std::max(bound, 2.0 * portfolio_params()->alpha * (z.squaredNorm() + 1.0));
        break;
      case ProblemKind::Flow:
        bound = std::max(bound, 2.0 * z.maxCoeff());
        break;
      case ProblemKind::Newsvendor:
        throw std::logic_error("gradient_lipschitz_bound: newsvendor costs are nonsmooth");
    }
  }
  return bound;
}

ProblemInstance default_newsvendor() {
  std::vector<Vector> z{Vector{{33.0, 15.0}}, Vector{{71.0, 4.0}}, Vector{{17.0, 47.0}},
                        Vector{{4.0, 43.0}}};
  return ProblemInstance::newsvendor(ScenarioSet(std::move(z)), Vector{{1.0, 1.3}},
                                     Vector{{9.0, 8.0}}, 50.0);
}

ProblemInstance triangle_flow(std::vector<Vector> scenarios, double lower, double upper,
                              Vector target) {
  // Edges e0: 0->1, e1: 1->2, e2: 2->0. Row = node, +1 leaving, -1 entering.
  Matrix a{{1.0, 0.0, -1.0}, {-1.0, 1.0, 0.0}, {0.0, -1.0, 1.0}};
  return ProblemInstance::flow(ScenarioSet(std::move(scenarios)), std::move(a),
                               Vector::Constant(3, lower), Vector::Constant(3, upper),
                               std::move(target));
}

}  // namespace iceo
