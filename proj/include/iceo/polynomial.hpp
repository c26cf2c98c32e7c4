#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace iceo {

/// Sorted (variable, exponent) pairs with positive exponents.
using Monomial = std::vector<std::pair<int, int>>;

/// Sparse multivariate polynomial with real coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial variable(int index, double coef = 1.0);

  const std::map<Monomial, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  double evaluate(const std::vector<double>& values) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  Polynomial pow(int e) const;
  /// Drops terms with |coef| <= tol.
  void prune(double tol = 0.0);

 private:
  void add_term(const Monomial& m, double c);
  std::map<Monomial, double> terms_;
};

Monomial multiply(const Monomial& a, const Monomial& b);

}  // namespace iceo
