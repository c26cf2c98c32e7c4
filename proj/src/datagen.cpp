#include "iceo/datagen.hpp"

#include <cmath>
#include <stdexcept>

namespace iceo {

void DgpConfig::validate() const {
  if (feature_dim < 1) throw std::invalid_argument("DgpConfig: p must be >= 1");
  if (!(feature_scale > 0.0)) throw std::invalid_argument("DgpConfig: M must be > 0");
  if (num_scenarios < 2) throw std::invalid_argument("DgpConfig: K must be >= 2");
  if (degree < 1) throw std::invalid_argument("DgpConfig: deg must be >= 1");
  if (true_weights.rows() != num_scenarios || true_weights.cols() != feature_dim ||
      true_bias.size() != num_scenarios) {
    throw std::invalid_argument("DgpConfig: B* / b* shape mismatch");
  }
}

DgpConfig make_dgp(int feature_dim, double feature_scale, int num_scenarios, int degree,
                   std::uint64_t seed, int max_entry) {
  if (max_entry < 0) throw std::invalid_argument("make_dgp: max_entry must be >= 0");
  DgpConfig cfg;
  cfg.feature_dim = feature_dim;
  cfg.feature_scale = feature_scale;
  cfg.num_scenarios = num_scenarios;
  cfg.degree = degree;
  cfg.seed = seed;
  Rng rng(seed);
  std::uniform_int_distribution<int> entry(0, max_entry);
  cfg.true_weights.resize(num_scenarios, feature_dim);
  for (int k = 0; k < num_scenarios; ++k) {
    for (int j = 0; j < feature_dim; ++j) cfg.true_weights(k, j) = entry(rng);
  }
  cfg.true_bias = Vector::Zero(num_scenarios);
  cfg.validate();
  return cfg;
}

double signed_power(double v, int degree) {
  const double m = std::pow(std::abs(v), degree);
  return v < 0.0 ? -m : m;
}

Matrix generate_features(int n, const DgpConfig& cfg, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_features: n must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(cfg.feature_scale));
  Matrix x(n, cfg.feature_dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < cfg.feature_dim; ++j) x(i, j) = normal(rng);
  }
  return x;
}

ProbVector conditional_probs(const Vector& x, const DgpConfig& cfg) {
  Vector v = cfg.true_weights * x + cfg.true_bias;
  if (cfg.degree != 1) {
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = signed_power(v[k], cfg.degree);
  }
  return softmax(v);
}

std::vector<int> sample_labels(const std::vector<ProbVector>& probs, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> out;
  out.reserve(probs.size());
  for (const auto& p : probs) {
    const double u = unif(rng);
    double acc = 0.0;
    int k = p.size() - 1;
    for (int j = 0; j < p.size(); ++j) {
      acc += p[j];
      if (u < acc) {
        k = j;
        break;
      }
    }
    // Never land on a zero-probability tail scenario through rounding.
    while (p[k] <= 0.0 && k > 0) --k;
    out.push_back(k);
  }
  return out;
}

Dataset generate_dataset(int n, const DgpConfig& cfg, std::uint64_t seed, Split split) {
  cfg.validate();
  Dataset d;
  d.features = generate_features(n, cfg, mix_seed(seed, 1));
  std::vector<ProbVector> probs;
  probs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) probs.push_back(conditional_probs(d.x(i), cfg));
  d.labels = sample_labels(probs, mix_seed(seed, 2));
  d.num_scenarios = cfg.num_scenarios;
  d.split = split;
  d.seed = seed;
  return d;
}

}  // namespace iceo
