#include "iceo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace iceo {

ProbVector::ProbVector(Vector values) : values_(std::move(values)) {
  if (values_.size() < 1) throw std::invalid_argument("ProbVector: empty");
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    const double v = values_[k];
    if (!std::isfinite(v)) throw std::invalid_argument("ProbVector: non-finite entry");
    if (v < -1e-12) {
      throw std::invalid_argument("ProbVector: negative entry " + std::to_string(v));
    }
    if (v < 0.0) values_[k] = 0.0;
  }
  const double sum = values_.sum();
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("ProbVector: entries sum to " + std::to_string(sum));
  }
  if (sum != 1.0) values_ /= sum;
}

ProbVector ProbVector::uniform(int num_scenarios) {
  if (num_scenarios < 1) throw std::invalid_argument("ProbVector::uniform: K < 1");
  return ProbVector(Vector::Constant(num_scenarios, 1.0 / num_scenarios));
}

ProbVector ProbVector::vertex(int num_scenarios, int k) {
  if (k < 0 || k >= num_scenarios) throw std::invalid_argument("ProbVector::vertex: bad index");
  Vector e = Vector::Zero(num_scenarios);
  e[k] = 1.0;
  return ProbVector(std::move(e));
}

ScenarioSet::ScenarioSet(std::vector<Vector> scenarios) : scenarios_(std::move(scenarios)) {
  if (scenarios_.size() < 2) throw std::invalid_argument("ScenarioSet: need K >= 2 scenarios");
  const auto dim = scenarios_.front().size();
  if (dim < 1) throw std::invalid_argument("ScenarioSet: empty scenario vector");
  for (const auto& z : scenarios_) {
    if (z.size() != dim) throw std::invalid_argument("ScenarioSet: inconsistent dimensions");
    if (!z.allFinite()) throw std::invalid_argument("ScenarioSet: non-finite scenario");
  }
  for (std::size_t i = 0; i < scenarios_.size(); ++i) {
    for (std::size_t j = i + 1; j < scenarios_.size(); ++j) {
      if (scenarios_[i] == scenarios_[j]) {
        throw std::invalid_argument("ScenarioSet: scenarios must be pairwise distinct");
      }
    }
  }
}

double ScenarioSet::max_abs() const {
  double m = 0.0;
  for (const auto& z : scenarios_) m = std::max(m, z.cwiseAbs().maxCoeff());
  return m;
}

ProbVector softmax(const Vector& v) {
  if (v.size() < 1) throw std::invalid_argument("softmax: empty input");
  if (!v.allFinite()) throw std::invalid_argument("softmax: non-finite input");
  const double shift = v.maxCoeff();
  Vector e = (v.array() - shift).exp().matrix();
  e /= e.sum();
  return ProbVector(std::move(e));
}

std::vector<ProbVector> sample_simplex_uniform(int num_scenarios, int n, std::uint64_t seed) {
  if (num_scenarios < 2) throw std::invalid_argument("sample_simplex_uniform: K < 2");
  if (n < 1) throw std::invalid_argument("sample_simplex_uniform: n < 1");
  Rng rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::vector<ProbVector> out;
  out.reserve(static_cast<std::size_t>(n));
  Vector e(num_scenarios);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < num_scenarios; ++k) e[k] = exp1(rng);
    out.emplace_back(e / e.sum());
  }
  return out;
}

namespace {

void enumerate_rec(int k, int remaining, std::vector<int>& alpha,
                   std::vector<std::vector<int>>& out) {
  const int last = static_cast<int>(alpha.size()) - 1;
  if (k == last) {
    alpha[k] = remaining;
    out.push_back(alpha);
    return;
  }
  for (int a = 0; a <= remaining; ++a) {
    alpha[k] = a;
    enumerate_rec(k + 1, remaining - a, alpha, out);
  }
}

}  // namespace

SimplexGrid enumerate_grid(int num_scenarios, int order) {
  if (num_scenarios < 2) throw std::invalid_argument("enumerate_grid: K < 2");
  if (order < 1) throw std::invalid_argument("enumerate_grid: s < 1");
  SimplexGrid grid;
  grid.num_scenarios = num_scenarios;
  grid.order = order;
  std::vector<int> alpha(static_cast<std::size_t>(num_scenarios), 0);
  enumerate_rec(0, order, alpha, grid.multi_indices);
  grid.points.reserve(grid.multi_indices.size());
  for (const auto& a : grid.multi_indices) {
    Vector p(num_scenarios);
    for (int k = 0; k < num_scenarios; ++k) p[k] = static_cast<double>(a[k]) / order;
    grid.points.emplace_back(std::move(p));
  }
  return grid;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace iceo
