#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "iceo/simplex.hpp"

namespace iceo::testing {

inline Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Columns are partial derivatives.
inline Matrix central_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
  const Vector f0 = f(x);
  Matrix j(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

/// Directional derivative along u.
inline Vector central_directional(const std::function<Vector(const Vector&)>& f, const Vector& x,
                                  const Vector& u, double h) {
  return (f(x + h * u) - f(x - h * u)) / (2.0 * h);
}

inline double rel_err(const Matrix& got, const Matrix& want, double floor = 1e-8) {
  return (got - want).norm() / std::max(want.norm(), floor);
}

/// Unit direction in the tangent space {u : sum u = 0}.
inline Vector tangent_direction(int K, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector u(K);
  for (int k = 0; k < K; ++k) u[k] = n(rng);
  u.array() -= u.mean();
  return u / u.norm();
}

/// A simplex point bounded away from the faces.
inline Vector interior_point(int K, std::mt19937_64& rng, double margin = 0.05) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(K);
  for (int k = 0; k < K; ++k) v[k] = margin + u(rng);
  return v / v.sum();
}

inline Vector gaussian_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("iceo-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace iceo::testing
