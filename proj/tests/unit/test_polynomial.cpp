#include <doctest.h>

#include <cmath>

#include "iceo/polynomial.hpp"

using namespace iceo;

TEST_CASE("arithmetic and evaluation") {
  const auto x = Polynomial::variable(0), y = Polynomial::variable(1);
  const Polynomial p = (x + 2.0 * y) * (x - y) + Polynomial::constant(3.0);
  // x^2 + x y - 2 y^2 + 3
  CHECK(p.terms().size() == 4);
  CHECK(p.degree() == 2);
  for (double a : {-1.5, 0.0, 2.0}) {
    for (double b : {-0.5, 1.0, 3.0}) {
      CHECK(p.evaluate({a, b}) == doctest::Approx(a * a + a * b - 2 * b * b + 3));
    }
  }
}

TEST_CASE("cancellation removes terms") {
  const auto x = Polynomial::variable(2);
  const Polynomial z = x - x;
  CHECK(z.is_zero());
  Polynomial tiny = Polynomial::constant(1e-15) + x;
  tiny.prune(1e-12);
  CHECK(tiny.terms().size() == 1);
}

TEST_CASE("powers match repeated multiplication") {
  const auto p = Polynomial::variable(0) + Polynomial::variable(1) * 0.5 + Polynomial::constant(1.0);
  Polynomial q = Polynomial::constant(1.0);
  for (int i = 0; i < 4; ++i) q = q * p;
  const Polynomial r = p.pow(4);
  CHECK(r.terms().size() == q.terms().size());
  CHECK(r.degree() == 4);
  CHECK(r.evaluate({0.3, -1.2}) == doctest::Approx(std::pow(0.3 - 0.6 + 1.0, 4)));
  CHECK(p.pow(0).evaluate({5.0, 5.0}) == 1.0);
}

TEST_CASE("monomial multiplication merges exponents") {
  const Monomial a{{0, 1}, {3, 2}};
  const Monomial b{{1, 1}, {3, 1}};
  const Monomial want{{0, 1}, {1, 1}, {3, 3}};
  CHECK(multiply(a, b) == want);
}
