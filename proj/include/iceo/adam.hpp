#pragma once

#include <cmath>

#include "iceo/simplex.hpp"

namespace iceo {

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias-corrected first and second moments.
class Adam {
 public:
  Adam(Eigen::Index num_params, AdamConfig cfg)
      : cfg_(cfg), m_(Vector::Zero(num_params)), v_(Vector::Zero(num_params)) {}

  void step(Vector& params, const Vector& grad) { step(params, grad, cfg_.lr); }

  void step(Vector& params, const Vector& grad, double lr) {
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.eps);
  }

  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  Vector m_;
  Vector v_;
  long t_ = 0;
};

}  // namespace iceo
