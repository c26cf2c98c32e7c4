#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "iceo/adam.hpp"
#include "iceo/dataset.hpp"
#include "iceo/hypothesis.hpp"
#include "iceo/oracle.hpp"
#include "iceo/surrogate.hpp"

namespace iceo {

using Policy = std::function<Vector(const Vector& x)>;

struct TrainConfig {
  double rho = 0.01;
  AdamConfig adam;
  int epochs = 500;
  /// <= 0 means full batch.
  int batch_size = 32;
  std::uint64_t seed = 0;
  /// Early stopping: stop after this many epochs without validation improvement.
  int patience = 50;
  /// Validation is evaluated every eval_every epochs.
  int eval_every = 1;

  void validate() const;
};

struct TrainResult {
  std::unique_ptr<Hypothesis> hypothesis;
  std::vector<double> loss_trace;        // mean training loss per epoch
  std::vector<double> validation_trace;  // one entry per evaluation, first is h0
  int best_epoch = 0;                    // 0 means h0 was kept
  double best_validation = 0.0;
};

/// Mini-batch loss and parameter gradient summed over the given indices.
using BatchLoss = std::function<double(const Hypothesis& h, const std::vector<int>& idx, Vector& grad)>;
/// Lower is better.
using ValidationScore = std::function<double(const Hypothesis& h)>;

/// Generic Adam loop: reshuffled mini-batches, best-on-validation parameters.
TrainResult train_hypothesis(int n, const Hypothesis& h0, const BatchLoss& loss, const ValidationScore& score,
                             const TrainConfig& cfg);

/// (1/n) sum_i c(w~(f(x_i)), xi_i) + rho phi(w~(f(x_i)))
double iceo_objective(const Dataset& data, const Hypothesis& h, const Surrogate& surrogate,
                      const ProblemInstance& problem, double rho);

struct IceoGradientParts {
  Vector cost;         // through dc/dw
  Vector regularizer;  // through grad phi, without the rho factor
  Vector total(double rho) const { return cost + rho * regularizer; }
};

IceoGradientParts iceo_gradient_parts(const Dataset& data, const Hypothesis& h, const Surrogate& surrogate,
                                      const ProblemInstance& problem);
Vector iceo_gradient(const Dataset& data, const Hypothesis& h, const Surrogate& surrogate,
                     const ProblemInstance& problem, double rho);

/// x -> w_rho(f(x)) through the exact oracle.
Policy deployed_policy(const Hypothesis& h, const ProblemInstance& problem, const OracleConfig& cfg);
/// x -> Proj_S(w~(f(x))).
Policy surrogate_policy(const Hypothesis& h, const Surrogate& surrogate, const ProblemInstance& problem);

/// (1/n) sum_i c(Proj_S(pi(x_i)), xi_i) + rho phi(Proj_S(pi(x_i))).
double empirical_risk(const Dataset& data, const Policy& policy, const ProblemInstance& problem, double rho);

/// Trains on the surrogate objective. The validation score is the unregularized
/// cost of exact-oracle deployment on `validation` (or the training objective
/// when `validation` is empty).
TrainResult train_iceo(const Dataset& train, const Dataset& validation, const Hypothesis& h0,
                       const Surrogate& surrogate, const ProblemInstance& problem, const TrainConfig& cfg);

struct TunedResult {
  TrainResult result;
  double lr = 0.0;
};

/// Runs train_iceo for each learning rate and keeps the best validation score
/// (first wins on ties).
TunedResult tune_iceo(const Dataset& train, const Dataset& validation, const Hypothesis& h0,
                      const Surrogate& surrogate, const ProblemInstance& problem, const TrainConfig& cfg,
                      const std::vector<double>& learning_rates);

}  // namespace iceo
