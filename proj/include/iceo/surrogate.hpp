#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iceo/errors.hpp"
#include "iceo/json_io.hpp"
#include "iceo/oracle.hpp"

namespace iceo {

struct SurrogateEval {
  Vector value;     // d
  Matrix jacobian;  // d x K, with respect to the ambient simplex coordinates
};

/// Differentiable stand-in for the regularized oracle p -> w_rho(p).
class Surrogate {
 public:
  virtual ~Surrogate() = default;

  virtual std::string kind() const = 0;
  virtual int num_scenarios() const = 0;
  virtual int dimension() const = 0;

  /// Evaluation at an arbitrary point of the affine hull of the simplex.
  virtual Vector evaluate_at(const Vector& p) const = 0;
  virtual SurrogateEval evaluate_with_jacobian_at(const Vector& p) const = 0;

  Vector evaluate(const ProbVector& p) const { return evaluate_at(p.values()); }
  SurrogateEval evaluate_with_jacobian(const ProbVector& p) const {
    return evaluate_with_jacobian_at(p.values());
  }

  virtual nlohmann::json to_json() const = 0;
};

/// Wraps the exact oracle. Its Jacobian is not available.
class ExactOracleSurrogate final : public Surrogate {
 public:
  ExactOracleSurrogate(const ProblemInstance& problem, OracleConfig cfg);

  std::string kind() const override { return "exact"; }
  int num_scenarios() const override { return problem_->num_scenarios(); }
  int dimension() const override { return problem_->dimension(); }
  Vector evaluate_at(const Vector& p) const override;
  SurrogateEval evaluate_with_jacobian_at(const Vector& p) const override;
  nlohmann::json to_json() const override;

 private:
  const ProblemInstance* problem_;
  OracleConfig cfg_;
};

/// A constant map; zero Jacobian.
class ConstantSurrogate final : public Surrogate {
 public:
  ConstantSurrogate(int num_scenarios, Vector value);

  std::string kind() const override { return "constant"; }
  int num_scenarios() const override { return num_scenarios_; }
  int dimension() const override { return static_cast<int>(value_.size()); }
  Vector evaluate_at(const Vector&) const override { return value_; }
  SurrogateEval evaluate_with_jacobian_at(const Vector&) const override;
  nlohmann::json to_json() const override;

 private:
  int num_scenarios_;
  Vector value_;
};

struct SurrogateSample {
  ProbVector p;
  Vector w;
};

/// m points p_i uniform on the simplex with w_i = w_rho(p_i) + sigma * N(0, I).
std::vector<SurrogateSample> generate_surrogate_samples(const ProblemInstance& problem,
                                                        const OracleConfig& cfg, int m, double sigma,
                                                        std::uint64_t seed);

/// Like generate_surrogate_samples, but the first round(vertex_fraction * m)
/// points come from a symmetric Dirichlet(concentration) law, which puts more
/// mass near the faces and vertices of the simplex.
std::vector<SurrogateSample> generate_surrogate_samples_mixed(const ProblemInstance& problem,
                                                              const OracleConfig& cfg, int m, double sigma,
                                                              std::uint64_t seed, double vertex_fraction,
                                                              double concentration);

// ---------------------------------------------------------------------------
// Bernstein interpolation on the simplex grid.

class BernsteinModel final : public Surrogate {
 public:
  BernsteinModel(int order, std::vector<std::vector<int>> multi_indices, Matrix coefficients);

  std::string kind() const override { return "bernstein"; }
  int num_scenarios() const override { return num_scenarios_; }
  int dimension() const override { return static_cast<int>(coefficients_.cols()); }
  int order() const { return order_; }
  const std::vector<std::vector<int>>& multi_indices() const { return multi_indices_; }
  /// Row i holds the oracle value at multi_indices()[i] / order.
  const Matrix& coefficients() const { return coefficients_; }
  /// s! / alpha! for every multi-index.
  const Vector& multinomials() const { return multinomials_; }

  Vector evaluate_at(const Vector& p) const override;
  SurrogateEval evaluate_with_jacobian_at(const Vector& p) const override;
  nlohmann::json to_json() const override;

 private:
  int order_;
  int num_scenarios_;
  std::vector<std::vector<int>> multi_indices_;
  Matrix coefficients_;
  Vector multinomials_;
};

/// Tabulates the oracle on the order-s grid (warm-started, lexicographic order).
/// Rejects grids with more than 1e6 points.
BernsteinModel bernstein_fit(const ProblemInstance& problem, const OracleConfig& cfg, int order);
SurrogateEval bernstein_eval(const BernsteinModel& model, const ProbVector& p);

/// sum over alpha in I(K, s) of (s! / alpha!) p^alpha.
double bernstein_partition_of_unity(int order, const Vector& p);

// ---------------------------------------------------------------------------
// Polynomial-kernel ridge regression, k(p, p') = (c + p.p')^s.

class KernelModel final : public Surrogate {
 public:
  KernelModel(int degree, double offset, double ridge, Matrix support, Matrix dual);

  std::string kind() const override { return "krr"; }
  int num_scenarios() const override { return static_cast<int>(support_.cols()); }
  int dimension() const override { return static_cast<int>(dual_.cols()); }
  int degree() const { return degree_; }
  double offset() const { return offset_; }
  double ridge() const { return ridge_; }
  /// One support point per row (m x K).
  const Matrix& support() const { return support_; }
  /// Dual coefficients, one column per output coordinate (m x d).
  const Matrix& dual() const { return dual_; }

  Vector evaluate_at(const Vector& p) const override;
  SurrogateEval evaluate_with_jacobian_at(const Vector& p) const override;
  nlohmann::json to_json() const override;

 private:
  int degree_;
  double offset_;
  double ridge_;
  Matrix support_;
  Matrix dual_;
};

Matrix polynomial_gram(const Matrix& support, int degree, double offset);
/// Smallest eigenvalue of the (symmetric) Gram matrix.
double gram_min_eigenvalue(const Matrix& gram);

/// Solves (G + m lambda I) a_j = w_j for every output coordinate j.
/// The Gram PSD check (min eigenvalue >= -1e-8) runs when m <= psd_check_limit.
KernelModel krr_fit(const std::vector<SurrogateSample>& samples, int degree, double offset, double ridge,
                    int psd_check_limit = 1000);
SurrogateEval krr_eval(const KernelModel& model, const ProbVector& p);

// ---------------------------------------------------------------------------
// One-hidden-layer tanh network trained on the MAPE loss.

struct MlpFitConfig {
  int hidden = 64;
  int epochs = 300;
  double lr = 1e-2;
  int batch_size = 64;
  std::uint64_t seed = 0;
  double mape_floor = 1e-3;
};

class MlpSurrogate final : public Surrogate {
 public:
  MlpSurrogate(Matrix w1, Vector b1, Matrix w2, Vector b2);

  std::string kind() const override { return "mlp"; }
  int num_scenarios() const override { return static_cast<int>(w1_.cols()); }
  int dimension() const override { return static_cast<int>(w2_.rows()); }
  int hidden() const { return static_cast<int>(w1_.rows()); }
  const Matrix& w1() const { return w1_; }
  const Vector& b1() const { return b1_; }
  const Matrix& w2() const { return w2_; }
  const Vector& b2() const { return b2_; }

  Vector evaluate_at(const Vector& p) const override;
  SurrogateEval evaluate_with_jacobian_at(const Vector& p) const override;
  nlohmann::json to_json() const override;

  /// Product of layer spectral norms times max |tanh'| = 1: a global Lipschitz bound.
  double lipschitz_bound() const;

 private:
  Matrix w1_;
  Vector b1_;
  Matrix w2_;
  Vector b2_;
};

struct MlpFitResult {
  MlpSurrogate model;
  std::vector<double> loss_trace;
};

MlpFitResult mlp_fit(const std::vector<SurrogateSample>& samples, const MlpFitConfig& cfg);
SurrogateEval mlp_eval(const MlpSurrogate& model, const ProbVector& p);

/// (1/(m d)) sum |pred - w| / max(|w|, floor)
double mape(const Surrogate& model, const std::vector<SurrogateSample>& samples, double floor = 1e-3);

// ---------------------------------------------------------------------------
// Serialization: {"format": "iceo-model", "version": 1, "kind": ..., "K": ..., "d": ..., ...}

inline constexpr int kModelFormatVersion = 1;

nlohmann::json surrogate_to_json(const Surrogate& model, double rho, std::uint64_t seed);
std::unique_ptr<Surrogate> surrogate_from_json(const nlohmann::json& j);

}  // namespace iceo
