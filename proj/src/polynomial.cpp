#include "iceo/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace iceo {

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  p.add_term({}, c);
  return p;
}

Polynomial Polynomial::variable(int index, double coef) {
  if (index < 0) throw std::invalid_argument("Polynomial::variable: negative index");
  Polynomial p;
  p.add_term({{index, 1}}, coef);
  return p;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int e = 0;
    for (const auto& ve : m) e += ve.second;
    d = std::max(d, e);
  }
  return d;
}

double Polynomial::evaluate(const std::vector<double>& values) const {
  double total = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (const auto& [v, e] : m) {
      if (v >= static_cast<int>(values.size())) throw std::out_of_range("Polynomial::evaluate: missing variable");
      t *= std::pow(values[static_cast<std::size_t>(v)], e);
    }
    total += t;
  }
  return total;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= s;
  return *this;
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
  }
  return out;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
  Polynomial result = constant(1.0);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

void Polynomial::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it = std::abs(it->second) <= tol ? terms_.erase(it) : std::next(it);
  }
}

}  // namespace iceo
