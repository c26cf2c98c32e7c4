#include "iceo/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace iceo {

Vector saa_decision(const Dataset& data, const ProblemInstance& problem, const OracleConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("saa_decision: empty dataset");
  return regularized_solution(problem, data.label_frequencies(), cfg);
}

double mean_cross_entropy(const Dataset& data, const Hypothesis& h) {
  if (data.empty()) throw std::invalid_argument("mean_cross_entropy: empty dataset");
  double total = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    total += cross_entropy_loss(h.forward(data.x(i)), data.labels[static_cast<std::size_t>(i)]).value;
  }
  return total / data.size();
}

TrainResult pto_train(const Dataset& train, const Dataset& validation, const Hypothesis& h0,
                      const TrainConfig& cfg) {
  if (train.empty()) throw std::invalid_argument("pto_train: empty training set");
  if (h0.num_scenarios() != train.num_scenarios || h0.feature_dim() != train.feature_dim()) {
    throw std::invalid_argument("pto_train: hypothesis and dataset disagree");
  }
  BatchLoss loss = [&](const Hypothesis& h, const std::vector<int>& idx, Vector& grad) {
    double total = 0.0;
    for (int i : idx) {
      const CrossEntropy ce = cross_entropy_with_gradient(h, train.x(i), train.labels[static_cast<std::size_t>(i)]);
      total += ce.value;
      grad += ce.gradient;
    }
    return total;
  };
  const Dataset& scored = validation.empty() ? train : validation;
  ValidationScore score = [&](const Hypothesis& h) { return mean_cross_entropy(scored, h); };
  return train_hypothesis(train.size(), h0, loss, score, cfg);
}

TunedResult tune_pto(const Dataset& train, const Dataset& validation, const Hypothesis& h0,
                     const TrainConfig& cfg, const std::vector<double>& learning_rates) {
  if (learning_rates.empty()) throw std::invalid_argument("tune_pto: empty learning-rate grid");
  TunedResult best;
  bool have = false;
  for (double lr : learning_rates) {
    TrainConfig c = cfg;
    c.adam.lr = lr;
    TrainResult r = pto_train(train, validation, h0, c);
    if (!have || r.best_validation < best.result.best_validation) {
      best.result = std::move(r);
      best.lr = lr;
      have = true;
    }
  }
  return best;
}

namespace {

ProbVector aggregate(const Vector& sample_weights, const Dataset& data) {
  Vector p = Vector::Zero(data.num_scenarios);
  for (int i = 0; i < data.size(); ++i) p[data.labels[static_cast<std::size_t>(i)]] += sample_weights[i];
  return ProbVector(p / p.sum());
}

Vector squared_distances(const Vector& x, const Dataset& data) {
  if (x.size() != data.feature_dim()) throw std::invalid_argument("query has the wrong feature dimension");
  return (data.features.rowwise() - x.transpose()).rowwise().squaredNorm();
}

}  // namespace

PrescriptiveWeights knn_weights(const Vector& x_query, const Dataset& data, int k) {
  if (data.empty()) throw std::invalid_argument("knn: empty dataset");
  if (k < 1 || k > data.size()) throw std::invalid_argument("knn: need 1 <= k <= n");
  const Vector d2 = squared_distances(x_query, data);
  std::vector<int> idx(static_cast<std::size_t>(data.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&d2](int a, int b) { return d2[a] < d2[b] || (d2[a] == d2[b] && a < b); });
  Vector w = Vector::Zero(data.size());
  for (int j = 0; j < k; ++j) w[idx[static_cast<std::size_t>(j)]] = 1.0 / k;
  ProbVector probs = aggregate(w, data);
  return {std::move(w), std::move(probs)};
}

ProbVector knn_scenario_weights(const Vector& x_query, const Dataset& data, int k) {
  return knn_weights(x_query, data, k).scenario_probs;
}

PrescriptiveWeights kernel_weights(const Vector& x_query, const Dataset& data, double bandwidth,
                                   bool* underflow) {
  if (data.empty()) throw std::invalid_argument("kernel: empty dataset");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kernel: bandwidth must be > 0");
  const Vector d2 = squared_distances(x_query, data);
  const double scale = 2.0 * bandwidth * bandwidth;
  Vector w = d2.unaryExpr([scale](double v) { return std::exp(-v / scale); });
  const double total = w.sum();
  if (underflow) *underflow = false;
  if (!(total > 0.0) || !std::isfinite(total)) {
    if (underflow) *underflow = true;
    std::cerr << "warning: kernel weights underflow at bandwidth " << bandwidth
              << ", using empirical frequencies\n";
    w = Vector::Constant(data.size(), 1.0 / data.size());
  } else {
    w /= total;
  }
  ProbVector probs = aggregate(w, data);
  return {std::move(w), std::move(probs)};
}

ProbVector kernel_scenario_weights(const Vector& x_query, const Dataset& data, double bandwidth,
                                   bool* underflow) {
  return kernel_weights(x_query, data, bandwidth, underflow).scenario_probs;
}

Policy knn_policy(const Dataset& data, int k, const ProblemInstance& problem, const OracleConfig& cfg) {
  return [&data, k, &problem, cfg](const Vector& x) {
    return regularized_solution(problem, knn_scenario_weights(x, data, k), cfg);
  };
}

Policy kernel_policy(const Dataset& data, double bandwidth, const ProblemInstance& problem,
                     const OracleConfig& cfg) {
  return [&data, bandwidth, &problem, cfg](const Vector& x) {
    return regularized_solution(problem, kernel_scenario_weights(x, data, bandwidth), cfg);
  };
}

double median_pairwise_distance(const Dataset& data) {
  if (data.size() < 2) throw std::invalid_argument("median_pairwise_distance: need >= 2 samples");
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(data.size()) * (data.size() - 1) / 2);
  for (int i = 0; i < data.size(); ++i) {
    for (int j = i + 1; j < data.size(); ++j) d.push_back((data.features.row(i) - data.features.row(j)).norm());
  }
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (d.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(d.begin(), mid);
  return 0.5 * (lo + hi);
}

double improvement(double cost_entropy, double cost_iceo) {
  if (!(cost_entropy > 0.0)) throw std::invalid_argument("improvement: reference cost must be > 0");
  return (cost_entropy - cost_iceo) / cost_entropy;
}

TunedChoice tune_knn(const Dataset& train, const Dataset& validation, const ProblemInstance& problem,
                     const OracleConfig& cfg, const std::vector<int>& ks) {
  TunedChoice best{0.0, std::numeric_limits<double>::infinity()};
  for (int k : ks) {
    if (k < 1 || k > train.size()) continue;
    const double v = empirical_risk(validation, knn_policy(train, k, problem, cfg), problem, 0.0);
    if (v < best.validation_cost) best = {static_cast<double>(k), v};
  }
  if (best.parameter == 0.0) throw std::invalid_argument("tune_knn: no admissible k");
  return best;
}

TunedChoice tune_kernel(const Dataset& train, const Dataset& validation, const ProblemInstance& problem,
                        const OracleConfig& cfg, const std::vector<double>& bandwidths) {
  TunedChoice best{0.0, std::numeric_limits<double>::infinity()};
  for (double h : bandwidths) {
    const double v = empirical_risk(validation, kernel_policy(train, h, problem, cfg), problem, 0.0);
    if (v < best.validation_cost) best = {h, v};
  }
  if (best.parameter == 0.0) throw std::invalid_argument("tune_kernel: empty bandwidth grid");
  return best;
}

}  // namespace iceo
