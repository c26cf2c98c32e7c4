#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace iceo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point of the probability simplex. Construction validates the input:
/// entries in [-1e-12, 0) are clamped to zero, a sum off by at most 1e-6 is
/// renormalized, anything else throws std::invalid_argument.
class ProbVector {
 public:
  explicit ProbVector(Vector values);

  static ProbVector uniform(int num_scenarios);
  static ProbVector vertex(int num_scenarios, int k);

  const Vector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int k) const { return values_[k]; }

 private:
  Vector values_;
};

/// The finite support {z_1, ..., z_K} of the uncertain parameter.
class ScenarioSet {
 public:
  explicit ScenarioSet(std::vector<Vector> scenarios);

  int size() const { return static_cast<int>(scenarios_.size()); }
  int dimension() const { return static_cast<int>(scenarios_.front().size()); }
  const Vector& operator[](int k) const { return scenarios_[k]; }
  const std::vector<Vector>& scenarios() const { return scenarios_; }

  /// Largest absolute entry over all scenarios.
  double max_abs() const;

 private:
  std::vector<Vector> scenarios_;
};

/// All points alpha/s of the simplex with alpha a K-vector of nonnegative
/// integers summing to s, in ascending lexicographic order of alpha.
struct SimplexGrid {
  int num_scenarios = 0;
  int order = 0;
  std::vector<std::vector<int>> multi_indices;
  std::vector<ProbVector> points;

  std::size_t size() const { return points.size(); }
};

/// Numerically stable softmax (max-subtracted).
ProbVector softmax(const Vector& v);

/// n i.i.d. uniform draws on the simplex (normalized exponential spacings).
std::vector<ProbVector> sample_simplex_uniform(int num_scenarios, int n, std::uint64_t seed);

SimplexGrid enumerate_grid(int num_scenarios, int order);

/// binomial(n, k) as a double; exact while the result fits in 53 bits.
double binomial(int n, int k);

/// SplitMix64 finalizer; used to derive independent RNG streams from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag);

using Rng = std::mt19937_64;

}  // namespace iceo
