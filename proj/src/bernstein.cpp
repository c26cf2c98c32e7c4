#include <cmath>

#include "iceo/surrogate.hpp"

namespace iceo {

namespace {

double multinomial(int order, const std::vector<int>& alpha) {
  double r = 1.0;
  int remaining = order;
  for (int a : alpha) {
    r *= binomial(remaining, a);
    remaining -= a;
  }
  return r;
}

// pw(k, e) = p_k^e for e = 0..order.
Matrix power_table(const Vector& p, int order) {
  Matrix pw(p.size(), order + 1);
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    pw(k, 0) = 1.0;
    for (int e = 1; e <= order; ++e) pw(k, e) = pw(k, e - 1) * p[k];
  }
  return pw;
}

}  // namespace

BernsteinModel::BernsteinModel(int order, std::vector<std::vector<int>> multi_indices, Matrix coefficients)
    : order_(order), multi_indices_(std::move(multi_indices)), coefficients_(std::move(coefficients)) {
  if (order_ < 1) throw std::invalid_argument("BernsteinModel: order must be >= 1");
  if (multi_indices_.empty()) throw std::invalid_argument("BernsteinModel: empty grid");
  num_scenarios_ = static_cast<int>(multi_indices_.front().size());
  const double expected = binomial(num_scenarios_ + order_ - 1, num_scenarios_ - 1);
  if (static_cast<double>(multi_indices_.size()) != expected ||
      coefficients_.rows() != static_cast<Eigen::Index>(multi_indices_.size())) {
    throw std::invalid_argument("BernsteinModel: coefficient table size must equal |I(K,s)|");
  }
  multinomials_.resize(static_cast<Eigen::Index>(multi_indices_.size()));
  for (std::size_t i = 0; i < multi_indices_.size(); ++i) {
    int total = 0;
    for (int a : multi_indices_[i]) total += a;
    if (total != order_ || static_cast<int>(multi_indices_[i].size()) != num_scenarios_) {
      throw std::invalid_argument("BernsteinModel: malformed multi-index");
    }
    multinomials_[static_cast<Eigen::Index>(i)] = multinomial(order_, multi_indices_[i]);
  }
}

Vector BernsteinModel::evaluate_at(const Vector& p) const {
  if (p.size() != num_scenarios_) throw std::invalid_argument("BernsteinModel: wrong input length");
  const Matrix pw = power_table(p, order_);
  Vector out = Vector::Zero(dimension());
  for (std::size_t i = 0; i < multi_indices_.size(); ++i) {
    const auto& alpha = multi_indices_[i];
    double term = multinomials_[static_cast<Eigen::Index>(i)];
    for (int k = 0; k < num_scenarios_; ++k) term *= pw(k, alpha[k]);
    out += term * coefficients_.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return out;
}

SurrogateEval BernsteinModel::evaluate_with_jacobian_at(const Vector& p) const {
  if (p.size() != num_scenarios_) throw std::invalid_argument("BernsteinModel: wrong input length");
  const int K = num_scenarios_;
  const Matrix pw = power_table(p, order_);
  SurrogateEval out{Vector::Zero(dimension()), Matrix::Zero(dimension(), K)};
  Vector grad(K);
  for (std::size_t i = 0; i < multi_indices_.size(); ++i) {
    const auto& alpha = multi_indices_[i];
    const double c = multinomials_[static_cast<Eigen::Index>(i)];
    double term = c;
    for (int k = 0; k < K; ++k) term *= pw(k, alpha[k]);
    // d/dp_k p^alpha = alpha_k p_k^(alpha_k - 1) prod_{j != k} p_j^alpha_j
    for (int k = 0; k < K; ++k) {
      if (alpha[k] == 0) {
        grad[k] = 0.0;
        continue;
      }
      double g = c * alpha[k] * pw(k, alpha[k] - 1);
      for (int j = 0; j < K; ++j) {
        if (j != k) g *= pw(j, alpha[j]);
      }
      grad[k] = g;
    }
    const auto row = coefficients_.row(static_cast<Eigen::Index>(i)).transpose();
    out.value += term * row;
    out.jacobian += row * grad.transpose();
  }
  return out;
}

nlohmann::json BernsteinModel::to_json() const {
  return {{"kind", kind()},
          {"order", order_},
          {"multi_indices", multi_indices_},
          {"coefficients", matrix_to_json(coefficients_)}};
}

BernsteinModel bernstein_fit(const ProblemInstance& problem, const OracleConfig& cfg, int order) {
  const int K = problem.num_scenarios();
  if (binomial(K + order - 1, K - 1) > 1e6) {
    throw std::invalid_argument("bernstein_fit: grid has more than 1e6 points");
  }
  const SimplexGrid grid = enumerate_grid(K, order);
  Matrix coefficients(static_cast<Eigen::Index>(grid.size()), problem.dimension());
  std::optional<Vector> warm;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    OracleResult r = solve_regularized(problem, grid.points[i], cfg, warm);
    coefficients.row(static_cast<Eigen::Index>(i)) = r.w.transpose();
    warm = std::move(r.w);
  }
  return BernsteinModel(order, grid.multi_indices, std::move(coefficients));
}

SurrogateEval bernstein_eval(const BernsteinModel& model, const ProbVector& p) {
  return model.evaluate_with_jacobian(p);
}

double bernstein_partition_of_unity(int order, const Vector& p) {
  const SimplexGrid grid = enumerate_grid(static_cast<int>(p.size()), order);
  const Matrix pw = power_table(p, order);
  double total = 0.0;
  for (const auto& alpha : grid.multi_indices) {
    double term = multinomial(order, alpha);
    for (Eigen::Index k = 0; k < p.size(); ++k) term *= pw(k, alpha[k]);
    total += term;
  }
  return total;
}

}  // namespace iceo
