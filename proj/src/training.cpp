#include "iceo/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace iceo {

void TrainConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("TrainConfig: rho must be > 0");
  if (!(adam.lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
  if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
  if (eval_every < 1) throw std::invalid_argument("TrainConfig: eval_every must be >= 1");
}

TrainResult train_hypothesis(int n, const Hypothesis& h0, const BatchLoss& loss, const ValidationScore& score,
                             const TrainConfig& cfg) {
  cfg.validate();
  if (n < 1) throw std::invalid_argument("train: empty training set");

  TrainResult out;
  auto h = h0.clone();
  Vector theta = h->params();
  Vector best = theta;
  out.best_validation = score(*h);
  out.validation_trace.push_back(out.best_validation);
  if (!std::isfinite(out.best_validation)) {
    throw TrainingDivergence("train: non-finite validation score at initialization", 0);
  }

  Adam adam(h->num_params(), cfg.adam);
  Rng rng(cfg.seed);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const int batch = cfg.batch_size <= 0 ? n : std::min(cfg.batch_size, n);
  Vector grad(h->num_params());
  int last_improvement = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (int start = 0; start < n; start += batch) {
      const int end = std::min(n, start + batch);
      const std::vector<int> idx(order.begin() + start, order.begin() + end);
      grad.setZero();
      total += loss(*h, idx, grad);
      grad /= static_cast<double>(idx.size());
      adam.step(theta, grad);
      h->set_params(theta);
    }
    const double mean_loss = total / n;
    out.loss_trace.push_back(mean_loss);
    if (!std::isfinite(mean_loss) || !theta.allFinite()) {
      throw TrainingDivergence("train: loss became non-finite at epoch " + std::to_string(epoch), epoch,
                               out.loss_trace);
    }
    if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
      const double v = score(*h);
      out.validation_trace.push_back(v);
      if (v < out.best_validation) {
        out.best_validation = v;
        out.best_epoch = epoch;
        best = theta;
        last_improvement = epoch;
      } else if (epoch - last_improvement >= cfg.patience) {
        break;
      }
    }
  }
  h->set_params(best);
  out.hypothesis = std::move(h);
  return out;
}

namespace {

void check_compatible(const Dataset& data, const Hypothesis& h, const Surrogate& s, const ProblemInstance& problem) {
  if (s.num_scenarios() != problem.num_scenarios() || s.dimension() != problem.dimension()) {
    throw std::invalid_argument("surrogate and problem disagree on K or d");
  }
  if (h.num_scenarios() != problem.num_scenarios() || data.num_scenarios != problem.num_scenarios()) {
    throw std::invalid_argument("hypothesis, dataset and problem disagree on K");
  }
  if (h.feature_dim() != data.feature_dim()) {
    throw std::invalid_argument("hypothesis and dataset disagree on the feature dimension");
  }
}

double sample_objective(const Vector& x, int k, const Hypothesis& h, const Surrogate& s,
                        const ProblemInstance& problem, double rho) {
  const Vector w = s.evaluate(h.forward(x));
  return problem.cost(w, k) + rho * problem.phi(w);
}

// Accumulates cost and regularizer gradient paths for one sample; returns the
// sample objective at the given rho.
double sample_gradient(const Vector& x, int k, const Hypothesis& h, const Surrogate& s,
                       const ProblemInstance& problem, double rho, Vector& cost_path, Vector& reg_path) {
  const SurrogateEval se = s.evaluate_with_jacobian(h.forward(x));
  const CostEval ce = problem.cost_and_subgradient(se.value, k);
  cost_path += h.vjp(x, se.jacobian.transpose() * ce.gradient);
  reg_path += h.vjp(x, se.jacobian.transpose() * problem.phi_gradient(se.value));
  return ce.value + rho * problem.phi(se.value);
}

}  // namespace

double iceo_objective(const Dataset& data, const Hypothesis& h, const Surrogate& surrogate,
                      const ProblemInstance& problem, double rho) {
  if (data.empty()) throw std::invalid_argument("iceo_objective: empty dataset");
  check_compatible(data, h, surrogate, problem);
  double total = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    total += sample_objective(data.x(i), data.labels[static_cast<std::size_t>(i)], h, surrogate, problem, rho);
  }
  return total / data.size();
}

IceoGradientParts iceo_gradient_parts(const Dataset& data, const Hypothesis& h, const Surrogate& surrogate,
                                      const ProblemInstance& problem) {
  if (data.empty()) throw std::invalid_argument("iceo_gradient: empty dataset");
  check_compatible(data, h, surrogate, problem);
  IceoGradientParts parts{Vector::Zero(h.num_params()), Vector::Zero(h.num_params())};
  for (int i = 0; i < data.size(); ++i) {
    sample_gradient(data.x(i), data.labels[static_cast<std::size_t>(i)], h, surrogate, problem, 0.0, parts.cost,
                    parts.regularizer);
  }
  parts.cost /= data.size();
  parts.regularizer /= data.size();
  return parts;
}

Vector iceo_gradient(const Dataset& data, const Hypothesis& h, const Surrogate& surrogate,
                     const ProblemInstance& problem, double rho) {
  return iceo_gradient_parts(data, h, surrogate, problem).total(rho);
}

Policy deployed_policy(const Hypothesis& h, const ProblemInstance& problem, const OracleConfig& cfg) {
  return [&h, &problem, cfg](const Vector& x) { return regularized_solution(problem, h.forward(x), cfg); };
}

Policy surrogate_policy(const Hypothesis& h, const Surrogate& surrogate, const ProblemInstance& problem) {
  return [&h, &surrogate, &problem](const Vector& x) {
    return problem.region().project(surrogate.evaluate(h.forward(x)));
  };
}

double empirical_risk(const Dataset& data, const Policy& policy, const ProblemInstance& problem, double rho) {
  if (data.empty()) throw std::invalid_argument("empirical_risk: empty dataset");
  if (rho < 0.0) throw std::invalid_argument("empirical_risk: rho must be >= 0");
  double total = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const Vector w = problem.region().project(policy(data.x(i)));
    total += problem.cost(w, data.labels[static_cast<std::size_t>(i)]);
    if (rho > 0.0) total += rho * problem.phi(w);
  }
  return total / data.size();
}

TrainResult train_iceo(const Dataset& train, const Dataset& validation, const Hypothesis& h0,
                       const Surrogate& surrogate, const ProblemInstance& problem, const TrainConfig& cfg) {
  if (train.empty()) throw std::invalid_argument("train_iceo: empty training set");
  check_compatible(train, h0, surrogate, problem);
  const double rho = cfg.rho;
  BatchLoss loss = [&](const Hypothesis& h, const std::vector<int>& idx, Vector& grad) {
    Vector reg = Vector::Zero(grad.size());
    double total = 0.0;
    for (int i : idx) {
      total += sample_gradient(train.x(i), train.labels[static_cast<std::size_t>(i)], h, surrogate, problem, rho,
                               grad, reg);
    }
    grad += rho * reg;
    return total;
  };
  OracleConfig ocfg;
  ocfg.rho = rho;
  ValidationScore score;
  if (validation.empty()) {
    score = [&](const Hypothesis& h) { return iceo_objective(train, h, surrogate, problem, rho); };
  } else {
    score = [&, ocfg](const Hypothesis& h) {
      return empirical_risk(validation, deployed_policy(h, problem, ocfg), problem, 0.0);
    };
  }
  return train_hypothesis(train.size(), h0, loss, score, cfg);
}

TunedResult tune_iceo(const Dataset& train, const Dataset& validation, const Hypothesis& h0,
                      const Surrogate& surrogate, const ProblemInstance& problem, const TrainConfig& cfg,
                      const std::vector<double>& learning_rates) {
  if (learning_rates.empty()) throw std::invalid_argument("tune_iceo: empty learning-rate grid");
  TunedResult best;
  bool have = false;
  for (double lr : learning_rates) {
    TrainConfig c = cfg;
    c.adam.lr = lr;
    TrainResult r = train_iceo(train, validation, h0, surrogate, problem, c);
    if (!have || r.best_validation < best.result.best_validation) {
      best.result = std::move(r);
      best.lr = lr;
      have = true;
    }
  }
  return best;
}

}  // namespace iceo
