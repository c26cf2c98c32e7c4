#include <doctest.h>

#include <cmath>

#include "iceo/hypothesis.hpp"
#include "test_support.hpp"

using namespace iceo;

namespace {

/// f(x) as a function of the flat parameter vector.
std::function<Vector(const Vector&)> forward_of_params(const Hypothesis& h, const Vector& x) {
  return [&h, x](const Vector& theta) {
    auto c = h.clone();
    c->set_params(theta);
    return c->forward(x).values();
  };
}

}  // namespace

TEST_CASE("zero parameters give the uniform distribution") {
  const auto h = SoftmaxLinearHypothesis::zeros(4, 3);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const ProbVector f = h.forward(testing::gaussian_vector(3, rng, 10.0));
    for (int k = 0; k < 4; ++k) CHECK(f[k] == doctest::Approx(0.25));
  }
}

TEST_CASE("shifting the bias by a constant leaves the output unchanged") {
  auto h = SoftmaxLinearHypothesis::random(4, 3, 2, 1.0);
  const SoftmaxLinearHypothesis shifted(h.weights(), (h.bias().array() + 3.7).matrix());
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Vector x = testing::gaussian_vector(3, rng, 5.0);
    const Vector a = h.forward(x).values(), b = shifted.forward(x).values();
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::Index ia, ib;
    a.maxCoeff(&ia);
    b.maxCoeff(&ib);
    CHECK(ia == ib);
  }
}

TEST_CASE("linear forward matches a manual softmax") {
  const auto h = SoftmaxLinearHypothesis::random(3, 2, 4, 1.0);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Vector x = testing::gaussian_vector(2, rng);
    double z = 0.0;
    Vector e(3);
    for (int k = 0; k < 3; ++k) {
      double s = h.bias()[k];
      for (int j = 0; j < 2; ++j) s += h.weights()(k, j) * x[j];
      e[k] = std::exp(s);
      z += e[k];
    }
    CHECK((h.forward(x).values() - e / z).norm() <= 1e-14);
  }
}

TEST_CASE("forward output stays on the simplex for 1e4 random probes") {
  const auto lin = SoftmaxLinearHypothesis::random(4, 3, 6, 50.0);
  const auto mlp = SoftmaxMlpHypothesis::random(4, 3, 8, 7, 20.0);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10000; ++t) {
    const Vector x = testing::gaussian_vector(3, rng, 100.0);
    for (const Hypothesis* h : {static_cast<const Hypothesis*>(&lin), static_cast<const Hypothesis*>(&mlp)}) {
      const Vector f = h->forward(x).values();
      CHECK(f.minCoeff() >= 0.0);
      CHECK(std::abs(f.sum() - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("dimension mismatch is rejected") {
  const auto h = SoftmaxLinearHypothesis::zeros(2, 3);
  CHECK_THROWS_AS(h.forward(Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("parameter Jacobians match finite differences") {
  std::vector<std::unique_ptr<Hypothesis>> hs;
  hs.push_back(std::make_unique<SoftmaxLinearHypothesis>(SoftmaxLinearHypothesis::random(4, 3, 9, 0.3)));
  hs.push_back(std::make_unique<SoftmaxMlpHypothesis>(SoftmaxMlpHypothesis::random(4, 3, 6, 10, 0.5)));
  std::mt19937_64 rng(11);
  for (const auto& h : hs) {
    for (int t = 0; t < 20; ++t) {
      const Vector x = testing::gaussian_vector(3, rng);
      const Matrix fd = testing::central_jacobian(forward_of_params(*h, x), h->params(), 1e-6);
      const Matrix jac = h->param_jacobian(x);
      CHECK(testing::rel_err(jac, fd) < 1e-5);
      // vjp agrees with the explicit Jacobian
      const Vector u = testing::gaussian_vector(4, rng);
      CHECK(testing::rel_err(h->vjp(x, u), jac.transpose() * u) < 1e-12);
      // columns sum to zero: total probability is constant
      CHECK(jac.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("softmax differential at the uniform point") {
  const Matrix d = softmax_differential(Vector::Constant(4, 0.25));
  const Matrix want = Matrix::Identity(4, 4) / 4.0 - Matrix::Constant(4, 4, 1.0 / 16.0);
  CHECK((d - want).norm() <= 1e-15);
  const auto h = SoftmaxLinearHypothesis::zeros(4, 2);
  const Vector x{{0.5, -1.0}};
  CHECK((h.param_jacobian(x) - want * h.logits_param_jacobian(x)).norm() <= 1e-15);
  CHECK(d.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("cross-entropy examples") {
  Vector nearly = Vector::Constant(3, 1e-15);
  nearly[1] = 1.0 - 2e-15;
  CHECK(cross_entropy_loss(ProbVector(nearly), 1).value == doctest::Approx(0.0).epsilon(1e-12));
  for (int k = 0; k < 4; ++k) {
    CHECK(cross_entropy_loss(ProbVector::uniform(4), k).value == doctest::Approx(std::log(4.0)));
  }
  CHECK_THROWS(cross_entropy_loss(ProbVector::uniform(4), 4));
}

TEST_CASE("cross-entropy parameter gradient matches finite differences") {
  std::vector<std::unique_ptr<Hypothesis>> hs;
  hs.push_back(std::make_unique<SoftmaxLinearHypothesis>(SoftmaxLinearHypothesis::random(4, 3, 12, 0.3)));
  hs.push_back(std::make_unique<SoftmaxMlpHypothesis>(SoftmaxMlpHypothesis::random(4, 3, 5, 13, 0.5)));
  std::mt19937_64 rng(14);
  for (const auto& h : hs) {
    for (int t = 0; t < 20; ++t) {
      const Vector x = testing::gaussian_vector(3, rng);
      const int k = t % 4;
      auto f = [&](const Vector& theta) {
        auto c = h->clone();
        c->set_params(theta);
        return cross_entropy_loss(c->forward(x), k).value;
      };
      const Vector fd = testing::central_gradient(f, h->params(), 1e-6);
      CHECK(testing::rel_err(cross_entropy_with_gradient(*h, x, k).gradient, fd) < 1e-5);
    }
  }
}

TEST_CASE("cross-entropy is minimized near the generating frequencies") {
  // p = 1, K = 2, x in {-1, +1}; P(k = 0 | x) = sigmoid(2 x + 0.5).
  const double tb = 2.0, tc = 0.5;
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  auto population_ce = [&](double b, double c) {
    double total = 0.0;
    for (double x : {-1.0, 1.0}) {
      const SoftmaxLinearHypothesis h(Matrix{{b}, {0.0}}, Vector{{c, 0.0}});
      const double q = sigmoid(tb * x + tc);
      const ProbVector f = h.forward(Vector{{x}});
      total += 0.5 * (-q * std::log(f[0]) - (1.0 - q) * std::log(f[1]));
    }
    return total;
  };
  double best = 1e300, bb = 0.0, bc = 0.0;
  for (double b = -4.0; b <= 4.0 + 1e-9; b += 0.25) {
    for (double c = -2.0; c <= 2.0 + 1e-9; c += 0.25) {
      const double v = population_ce(b, c);
      if (v < best) {
        best = v;
        bb = b;
        bc = c;
      }
    }
  }
  CHECK(bb == doctest::Approx(tb));
  CHECK(bc == doctest::Approx(tc));
}

TEST_CASE("hypotheses round-trip through JSON") {
  const auto lin = SoftmaxLinearHypothesis::random(4, 3, 15);
  const auto mlp = SoftmaxMlpHypothesis::random(4, 3, 6, 16);
  for (const Hypothesis* h : {static_cast<const Hypothesis*>(&lin), static_cast<const Hypothesis*>(&mlp)}) {
    const auto back = hypothesis_from_json(nlohmann::json::parse(h->to_json().dump()));
    CHECK(back->kind() == h->kind());
    CHECK(back->params() == h->params());
  }
  CHECK_THROWS(hypothesis_from_json(nlohmann::json{{"kind", "tree"}}));
}

TEST_CASE("random initialization is seeded") {
  CHECK(SoftmaxMlpHypothesis::random(3, 2, 4, 1).params() == SoftmaxMlpHypothesis::random(3, 2, 4, 1).params());
  CHECK(SoftmaxMlpHypothesis::random(3, 2, 4, 1).params() != SoftmaxMlpHypothesis::random(3, 2, 4, 2).params());
}
