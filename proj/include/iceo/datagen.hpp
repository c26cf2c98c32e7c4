#pragma once

#include <cstdint>
#include <vector>

#include "iceo/dataset.hpp"

namespace iceo {

/// x ~ N(0, M I_p); xi takes scenario k with probability softmax(pow_deg(B* x + b*))_k,
/// where pow_deg is the elementwise signed power sign(v) |v|^deg.
struct DgpConfig {
  int feature_dim = 3;
  double feature_scale = 5.0;
  int num_scenarios = 4;
  Matrix true_weights;  // K x p
  Vector true_bias;     // K
  int degree = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// B* entries uniform on {0, ..., max_entry}, b* = 0.
DgpConfig make_dgp(int feature_dim, double feature_scale, int num_scenarios, int degree,
                   std::uint64_t seed, int max_entry = 150);

double signed_power(double v, int degree);

Matrix generate_features(int n, const DgpConfig& cfg, std::uint64_t seed);
ProbVector conditional_probs(const Vector& x, const DgpConfig& cfg);
std::vector<int> sample_labels(const std::vector<ProbVector>& probs, std::uint64_t seed);

/// Features from mix_seed(seed, 1), labels from mix_seed(seed, 2).
Dataset generate_dataset(int n, const DgpConfig& cfg, std::uint64_t seed, Split split = Split::Train);

}  // namespace iceo
