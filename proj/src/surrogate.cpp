#include "iceo/surrogate.hpp"

#include <cmath>

namespace iceo {

ExactOracleSurrogate::ExactOracleSurrogate(const ProblemInstance& problem, OracleConfig cfg)
    : problem_(&problem), cfg_(cfg) {
  cfg_.validate();
}

Vector ExactOracleSurrogate::evaluate_at(const Vector& p) const {
  return regularized_solution(*problem_, ProbVector(p), cfg_);
}

SurrogateEval ExactOracleSurrogate::evaluate_with_jacobian_at(const Vector&) const {
  throw std::logic_error("the exact oracle is not differentiable; no Jacobian available");
}

nlohmann::json ExactOracleSurrogate::to_json() const {
  return {{"kind", kind()}, {"rho", cfg_.rho}};
}

ConstantSurrogate::ConstantSurrogate(int num_scenarios, Vector value)
    : num_scenarios_(num_scenarios), value_(std::move(value)) {}

SurrogateEval ConstantSurrogate::evaluate_with_jacobian_at(const Vector&) const {
  return {value_, Matrix::Zero(value_.size(), num_scenarios_)};
}

nlohmann::json ConstantSurrogate::to_json() const {
  return {{"kind", kind()}, {"K", num_scenarios_}, {"value", vector_to_json(value_)}};
}

std::vector<SurrogateSample> generate_surrogate_samples(const ProblemInstance& problem,
                                                        const OracleConfig& cfg, int m, double sigma,
                                                        std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("generate_surrogate_samples: m must be >= 1");
  if (sigma < 0.0) throw std::invalid_argument("generate_surrogate_samples: sigma must be >= 0");
  auto points = sample_simplex_uniform(problem.num_scenarios(), m, mix_seed(seed, 1));
  Rng noise_rng(mix_seed(seed, 2));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SurrogateSample> out;
  out.reserve(points.size());
  for (auto& p : points) {
    Vector w = regularized_solution(problem, p, cfg);
    if (sigma > 0.0) {
      for (Eigen::Index j = 0; j < w.size(); ++j) w[j] += sigma * normal(noise_rng);
    }
    out.push_back({std::move(p), std::move(w)});
  }
  return out;
}

std::vector<SurrogateSample> generate_surrogate_samples_mixed(const ProblemInstance& problem,
                                                              const OracleConfig& cfg, int m, double sigma,
                                                              std::uint64_t seed, double vertex_fraction,
                                                              double concentration) {
  if (!(vertex_fraction >= 0.0 && vertex_fraction <= 1.0)) {
    throw std::invalid_argument("generate_surrogate_samples_mixed: vertex_fraction must lie in [0, 1]");
  }
  if (!(concentration > 0.0)) throw std::invalid_argument("generate_surrogate_samples_mixed: concentration must be > 0");
  auto out = generate_surrogate_samples(problem, cfg, m, sigma, seed);
  const int n_dir = static_cast<int>(std::lround(vertex_fraction * m));
  if (n_dir == 0) return out;
  const int K = problem.num_scenarios();
  Rng rng(mix_seed(seed, 3));
  Rng noise_rng(mix_seed(seed, 4));
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < n_dir; ++i) {
    Vector v(K);
    double total = 0.0;
    do {
      for (int k = 0; k < K; ++k) v[k] = gamma(rng);
      total = v.sum();
    } while (!(total > 0.0));
    ProbVector p(v / total);
    Vector w = regularized_solution(problem, p, cfg);
    if (sigma > 0.0) {
      for (Eigen::Index j = 0; j < w.size(); ++j) w[j] += sigma * normal(noise_rng);
    }
    out[static_cast<std::size_t>(i)] = {std::move(p), std::move(w)};
  }
  return out;
}

double mape(const Surrogate& model, const std::vector<SurrogateSample>& samples, double floor) {
  if (samples.empty()) throw std::invalid_argument("mape: empty sample set");
  double total = 0.0;
  for (const auto& s : samples) {
    const Vector pred = model.evaluate(s.p);
    for (Eigen::Index j = 0; j < pred.size(); ++j) {
      total += std::abs(pred[j] - s.w[j]) / std::max(std::abs(s.w[j]), floor);
    }
  }
  return total / (static_cast<double>(samples.size()) * model.dimension());
}

nlohmann::json surrogate_to_json(const Surrogate& model, double rho, std::uint64_t seed) {
  nlohmann::json j = model.to_json();
  j["format"] = "iceo-model";
  j["version"] = kModelFormatVersion;
  j["K"] = model.num_scenarios();
  j["d"] = model.dimension();
  j["rho"] = rho;
  j["seed"] = seed;
  return j;
}

std::unique_ptr<Surrogate> surrogate_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "iceo-model") throw std::invalid_argument("not an iceo-model container");
  if (j.value("version", 0) != kModelFormatVersion) {
    throw std::invalid_argument("unsupported iceo-model version");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "bernstein") {
    return std::make_unique<BernsteinModel>(j.at("order").get<int>(),
                                            j.at("multi_indices").get<std::vector<std::vector<int>>>(),
                                            matrix_from_json(j.at("coefficients")));
  }
  if (kind == "krr") {
    return std::make_unique<KernelModel>(j.at("degree").get<int>(), j.at("offset").get<double>(),
                                         j.at("ridge").get<double>(), matrix_from_json(j.at("support")),
                                         matrix_from_json(j.at("dual")));
  }
  if (kind == "mlp") {
    return std::make_unique<MlpSurrogate>(matrix_from_json(j.at("w1")), vector_from_json(j.at("b1")),
                                          matrix_from_json(j.at("w2")), vector_from_json(j.at("b2")));
  }
  if (kind == "constant") {
    return std::make_unique<ConstantSurrogate>(j.at("K").get<int>(), vector_from_json(j.at("value")));
  }
  throw std::invalid_argument("unknown surrogate kind: " + kind);
}

}  // namespace iceo
