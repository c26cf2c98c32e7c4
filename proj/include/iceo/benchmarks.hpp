#pragma once

#include <vector>

#include "iceo/training.hpp"

namespace iceo {

/// w_rho(p_hat) with p_hat the empirical label frequencies.
Vector saa_decision(const Dataset& data, const ProblemInstance& problem, const OracleConfig& cfg);

/// Cross-entropy training; validation score is the validation cross-entropy
/// (training cross-entropy when `validation` is empty).
TrainResult pto_train(const Dataset& train, const Dataset& validation, const Hypothesis& h0,
                      const TrainConfig& cfg);
/// Mean -log(f_k(x) + 1e-12) over the dataset.
double mean_cross_entropy(const Dataset& data, const Hypothesis& h);

/// Same as pto_train over several learning rates; best validation cross-entropy wins.
TunedResult tune_pto(const Dataset& train, const Dataset& validation, const Hypothesis& h0,
                     const TrainConfig& cfg, const std::vector<double>& learning_rates);

struct PrescriptiveWeights {
  Vector sample_weights;  // over training samples, sums to 1
  ProbVector scenario_probs;
};

/// Uniform weights on the k nearest x_i (Euclidean, ties broken by lower index).
PrescriptiveWeights knn_weights(const Vector& x_query, const Dataset& data, int k);
ProbVector knn_scenario_weights(const Vector& x_query, const Dataset& data, int k);

/// Gaussian weights exp(-|x - x_i|^2 / (2 h^2)). When every weight underflows
/// the empirical frequencies are returned and `underflow` is set.
PrescriptiveWeights kernel_weights(const Vector& x_query, const Dataset& data, double bandwidth,
                                   bool* underflow = nullptr);
ProbVector kernel_scenario_weights(const Vector& x_query, const Dataset& data, double bandwidth,
                                   bool* underflow = nullptr);

Policy knn_policy(const Dataset& data, int k, const ProblemInstance& problem, const OracleConfig& cfg);
Policy kernel_policy(const Dataset& data, double bandwidth, const ProblemInstance& problem,
                     const OracleConfig& cfg);

/// Median of the pairwise Euclidean distances between feature rows.
double median_pairwise_distance(const Dataset& data);

/// (cost_entropy - cost_iceo) / cost_entropy
double improvement(double cost_entropy, double cost_iceo);

struct TunedChoice {
  double parameter = 0.0;
  double validation_cost = 0.0;
};

/// Picks k (resp. the bandwidth) minimizing the validation cost; first wins on ties.
TunedChoice tune_knn(const Dataset& train, const Dataset& validation, const ProblemInstance& problem,
                     const OracleConfig& cfg, const std::vector<int>& ks);
TunedChoice tune_kernel(const Dataset& train, const Dataset& validation, const ProblemInstance& problem,
                        const OracleConfig& cfg, const std::vector<double>& bandwidths);

}  // namespace iceo
