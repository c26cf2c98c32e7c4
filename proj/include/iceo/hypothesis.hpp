#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "iceo/simplex.hpp"

namespace iceo {

/// A parameterized map x -> softmax(g_theta(x)) onto the simplex.
class Hypothesis {
 public:
  virtual ~Hypothesis() = default;

  virtual std::unique_ptr<Hypothesis> clone() const = 0;
  virtual std::string kind() const = 0;
  virtual int num_scenarios() const = 0;
  virtual int feature_dim() const = 0;
  virtual int num_params() const = 0;
  virtual Vector params() const = 0;
  virtual void set_params(const Vector& theta) = 0;

  virtual Vector logits(const Vector& x) const = 0;
  /// Jacobian of the logits with respect to the parameters (K x P).
  virtual Matrix logits_param_jacobian(const Vector& x) const = 0;
  /// (d logits / d theta)^T g for a logit-space cotangent g.
  virtual Vector logits_vjp(const Vector& x, const Vector& g) const = 0;

  virtual nlohmann::json to_json() const = 0;

  ProbVector forward(const Vector& x) const;
  /// Jacobian of f(x) with respect to all parameters (K x P).
  Matrix param_jacobian(const Vector& x) const;
  /// (d f(x) / d theta)^T u for a probability-space cotangent u.
  Vector vjp(const Vector& x, const Vector& u) const;

 protected:
  void check_input(const Vector& x) const;
};

/// diag(f) - f f^T, the differential of softmax at output f.
Matrix softmax_differential(const Vector& f);

/// softmax(B x + b). Parameters are B (row-major) followed by b.
class SoftmaxLinearHypothesis final : public Hypothesis {
 public:
  SoftmaxLinearHypothesis(Matrix weights, Vector bias);
  static SoftmaxLinearHypothesis zeros(int num_scenarios, int feature_dim);
  /// i.i.d. N(0, scale^2) entries.
  static SoftmaxLinearHypothesis random(int num_scenarios, int feature_dim, std::uint64_t seed,
                                        double scale = 0.1);

  std::unique_ptr<Hypothesis> clone() const override;
  std::string kind() const override { return "softmax-linear"; }
  int num_scenarios() const override { return static_cast<int>(weights_.rows()); }
  int feature_dim() const override { return static_cast<int>(weights_.cols()); }
  int num_params() const override { return static_cast<int>(weights_.size() + bias_.size()); }
  Vector params() const override;
  void set_params(const Vector& theta) override;

  Vector logits(const Vector& x) const override;
  Matrix logits_param_jacobian(const Vector& x) const override;
  Vector logits_vjp(const Vector& x, const Vector& g) const override;
  nlohmann::json to_json() const override;

  const Matrix& weights() const { return weights_; }
  const Vector& bias() const { return bias_; }

 private:
  Matrix weights_;
  Vector bias_;
};

/// softmax(W2 tanh(W1 x + b1) + b2). Parameters: W1, b1, W2, b2 (matrices row-major).
class SoftmaxMlpHypothesis final : public Hypothesis {
 public:
  SoftmaxMlpHypothesis(Matrix w1, Vector b1, Matrix w2, Vector b2);
  static SoftmaxMlpHypothesis random(int num_scenarios, int feature_dim, int hidden, std::uint64_t seed,
                                     double scale = 0.1);

  std::unique_ptr<Hypothesis> clone() const override;
  std::string kind() const override { return "softmax-mlp"; }
  int num_scenarios() const override { return static_cast<int>(w2_.rows()); }
  int feature_dim() const override { return static_cast<int>(w1_.cols()); }
  int hidden() const { return static_cast<int>(w1_.rows()); }
  int num_params() const override {
    return static_cast<int>(w1_.size() + b1_.size() + w2_.size() + b2_.size());
  }
  Vector params() const override;
  void set_params(const Vector& theta) override;

  Vector logits(const Vector& x) const override;
  Matrix logits_param_jacobian(const Vector& x) const override;
  Vector logits_vjp(const Vector& x, const Vector& g) const override;
  nlohmann::json to_json() const override;

 private:
  Matrix w1_;
  Vector b1_;
  Matrix w2_;
  Vector b2_;
};

std::unique_ptr<Hypothesis> hypothesis_from_json(const nlohmann::json& j);

inline constexpr double kCrossEntropyEps = 1e-12;

struct CrossEntropy {
  double value = 0.0;
  /// Gradient with respect to the probability vector (or the parameters, for
  /// cross_entropy_with_gradient).
  Vector gradient;
};

/// -log(f_k + 1e-12) and its gradient with respect to f.
CrossEntropy cross_entropy_loss(const ProbVector& f_x, int k);
/// Same loss through a hypothesis; gradient with respect to its parameters.
CrossEntropy cross_entropy_with_gradient(const Hypothesis& h, const Vector& x, int k);

}  // namespace iceo
