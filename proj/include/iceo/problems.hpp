#pragma once

#include <optional>
#include <string>
#include <variant>

#include "iceo/simplex.hpp"

namespace iceo {

/// Thrown when an iterative projection fails to converge (typically an empty
/// or badly conditioned region).
class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {w in R^d : w >= 0, sum(w) <= capacity}
struct BudgetSimplexRegion {
  int dim = 0;
  double capacity = 0.0;
};

/// Decision vector (w_1..w_d, w0) with w on the unit simplex and
/// 0 <= w0 <= return_bound.
struct PortfolioBoxRegion {
  int assets = 0;
  double return_bound = 0.0;
};

/// {w : A w = 0, lower <= w <= upper} for a node-arc incidence matrix A.
struct FlowPolytopeRegion {
  Matrix incidence;
  Vector lower;
  Vector upper;
  /// Orthogonal projector onto null(A), precomputed.
  Matrix null_projector;
  double sweep_tol = 1e-10;
  int max_sweeps = 100000;
};

enum class RegionKind { BudgetSimplex, PortfolioBox, FlowPolytope };

class FeasibleRegion {
 public:
  explicit FeasibleRegion(BudgetSimplexRegion r);
  explicit FeasibleRegion(PortfolioBoxRegion r);
  explicit FeasibleRegion(FlowPolytopeRegion r);

  RegionKind kind() const;
  int dimension() const;
  bool contains(const Vector& w, double tol = 1e-8) const;
  /// Euclidean projection. Throws ProjectionError if Dykstra's method does not settle.
  Vector project(const Vector& y) const;
  /// Analytic upper bound on the Euclidean diameter.
  double diameter() const;
  /// Axis-aligned bounding box of the region.
  std::pair<Vector, Vector> bounding_box() const;

  const BudgetSimplexRegion* budget() const { return std::get_if<BudgetSimplexRegion>(&region_); }
  const PortfolioBoxRegion* portfolio() const { return std::get_if<PortfolioBoxRegion>(&region_); }
  const FlowPolytopeRegion* flow() const { return std::get_if<FlowPolytopeRegion>(&region_); }

 private:
  std::variant<BudgetSimplexRegion, PortfolioBoxRegion, FlowPolytopeRegion> region_;
};

/// Euclidean projection onto {w : w >= 0, sum(w) = total}.
Vector project_onto_simplex(const Vector& y, double total = 1.0);
/// Euclidean projection onto {w : w >= 0, sum(w) <= capacity}.
Vector project_onto_capped_simplex(const Vector& y, double capacity);

struct CostEval {
  double value = 0.0;
  Vector gradient;
};

struct NewsvendorParams {
  Vector holding;
  Vector stockout;
  double capacity = 0.0;
};

struct PortfolioParams {
  double alpha = 1.0;
};

struct FlowParams {
  Vector target;
};

/// sum_l h_l (w_l - xi_l)^+ + b_l (xi_l - w_l)^+ ; the subgradient is 0 at a kink.
CostEval newsvendor_cost(const NewsvendorParams& params, const Vector& w, const Vector& xi);
/// alpha (w.xi - w0)^2 - w.xi where the decision is (w, w0).
CostEval portfolio_cost(const PortfolioParams& params, const Vector& decision, const Vector& xi);
/// sum_i xi_i (w_i - target_i)^2 ; rejects negative xi.
CostEval flow_cost(const FlowParams& params, const Vector& w, const Vector& xi);

enum class ProblemKind { Newsvendor, Portfolio, Flow };

std::string to_string(ProblemKind kind);

/// A nominal problem: scenario set, per-scenario convex costs, a compact
/// feasible region, and the regularizer phi(w) = 0.5 ||w||^2.
class ProblemInstance {
 public:
  static ProblemInstance newsvendor(ScenarioSet scenarios, Vector holding, Vector stockout,
                                    double capacity);
  /// return_bound defaults to the largest absolute scenario return.
  static ProblemInstance portfolio(ScenarioSet scenarios, double alpha,
                                   std::optional<double> return_bound = std::nullopt);
  static ProblemInstance flow(ScenarioSet scenarios, Matrix incidence, Vector lower, Vector upper,
                              Vector target);

  ProblemKind kind() const { return kind_; }
  int num_scenarios() const { return scenarios_.size(); }
  int dimension() const { return region_.dimension(); }
  const ScenarioSet& scenarios() const { return scenarios_; }
  const FeasibleRegion& region() const { return region_; }

  double cost(const Vector& w, int k) const { return cost_and_subgradient(w, k).value; }
  CostEval cost_and_subgradient(const Vector& w, int k) const;
  /// (c_1(w), ..., c_K(w))
  Vector cost_vector(const Vector& w) const;

  double phi(const Vector& w) const { return 0.5 * w.squaredNorm(); }
  Vector phi_gradient(const Vector& w) const { return w; }

  /// True when every c_k is differentiable with Lipschitz gradient.
  bool smooth() const { return kind_ != ProblemKind::Newsvendor; }
  /// Upper bound on the gradient Lipschitz constant of every c_k (smooth problems only).
  double gradient_lipschitz_bound() const;

  const NewsvendorParams* newsvendor_params() const {
    return std::get_if<NewsvendorParams>(&params_);
  }
  const PortfolioParams* portfolio_params() const { return std::get_if<PortfolioParams>(&params_); }
  const FlowParams* flow_params() const { return std::get_if<FlowParams>(&params_); }

 private:
  ProblemInstance(ProblemKind kind, ScenarioSet scenarios, FeasibleRegion region,
                  std::variant<NewsvendorParams, PortfolioParams, FlowParams> params);

  ProblemKind kind_;
  ScenarioSet scenarios_;
  FeasibleRegion region_;
  std::variant<NewsvendorParams, PortfolioParams, FlowParams> params_;
};

/// The two-product newsvendor instance used throughout the experiments:
/// C = 50, h = (1, 1.3), b = (9, 8), scenarios (33,15), (71,4), (17,47), (4,43).
ProblemInstance default_newsvendor();

/// Directed 3-cycle 0->1->2->0 with box [lower, upper] on every edge.
ProblemInstance triangle_flow(std::vector<Vector> scenarios, double lower, double upper,
                              Vector target);

}  // namespace iceo
