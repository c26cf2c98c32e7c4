#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iceo/datagen.hpp"
#include "iceo/hypothesis.hpp"
#include "iceo/problems.hpp"
#include "iceo/surrogate.hpp"
#include "iceo/training.hpp"

namespace iceo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  std::string kind = "newsvendor";
  std::vector<std::vector<double>> scenarios = {{33, 15}, {71, 4}, {17, 47}, {4, 43}};
  std::vector<double> holding = {1.0, 1.3};
  std::vector<double> stockout = {9.0, 8.0};
  double capacity = 50.0;
  double alpha = 1.0;        // portfolio
  double flow_lower = 0.0;   // flow (triangle network)
  double flow_upper = 10.0;
  std::vector<double> flow_target = {5.0, 5.0, 5.0};

  ProblemInstance build() const;
};

struct DgpSpec {
  int feature_dim = 3;
  double feature_scale = 5.0;
  int max_entry = 150;
  int degree = 1;
};

struct HypothesisSpec {
  std::string kind = "softmax-linear";
  int hidden = 32;
  double init_scale = 0.1;

  std::unique_ptr<Hypothesis> build(int num_scenarios, int feature_dim, std::uint64_t seed) const;
};

struct SurrogateSpec {
  std::string kind = "mlp";  // mlp | bernstein | krr
  int samples = 4000;
  double noise = 0.0;
  /// Share of samples drawn from Dirichlet(concentration) instead of uniformly.
  double vertex_fraction = 0.5;
  double concentration = 0.1;
  MlpFitConfig mlp{.hidden = 128, .epochs = 600};
  int order = 8;        // bernstein
  int degree = 3;       // krr
  double offset = 1.0;  // krr
  double ridge = 1e-6;  // krr
};

struct TrainingSpec {
  int epochs = 500;
  int batch_size = 32;
  int patience = 50;
  int eval_every = 5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> learning_rates = {1e-3, 1e-2};
  /// Starting point of ICEO training: "pto" (the tuned cross-entropy fit) or "random".
  std::string iceo_init = "pto";

  TrainConfig train_config(double rho, std::uint64_t seed) const;
};

struct MisspecSpec {
  std::vector<int> degrees = {1, 2, 3, 4};
  int sample_size = 500;
};

struct ExperimentConfig {
  ProblemSpec problem;
  DgpSpec dgp;
  std::vector<std::string> methods = {"iceo", "saa", "pto", "pres-knn", "pres-kernel"};
  std::vector<int> sample_sizes = {100, 300, 500, 700};
  int num_simulations = 25;
  int test_size = 1000;
  double rho = 0.01;
  double oracle_rho = 1e-6;  // for the true-hypothesis reference policy
  double validation_fraction = 0.2;
  HypothesisSpec hypothesis;
  SurrogateSpec surrogate;
  TrainingSpec training;
  std::vector<int> knn_grid = {5, 10, 20, 50};
  std::vector<double> bandwidth_factors = {0.5, 1.0, 2.0, 4.0};
  MisspecSpec misspec;
  std::uint64_t seed = 20240601;
  std::uint64_t test_seed = 20240602;
  std::string output_dir;

  /// Throws ConfigError.
  void validate() const;
};

inline const std::vector<std::string> kKnownMethods = {"iceo", "saa", "pto", "pres-knn", "pres-kernel", "oracle"};

/// Unknown keys are rejected; missing keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

}  // namespace iceo
