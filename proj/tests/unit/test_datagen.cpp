#include <doctest.h>

#include <cmath>

#include "iceo/datagen.hpp"
#include "test_support.hpp"

using namespace iceo;

TEST_CASE("feature moments") {
  const auto cfg = make_dgp(3, 5.0, 4, 1, 1);
  const Matrix x = generate_features(100000, cfg, 2);
  for (int j = 0; j < 3; ++j) {
    const double mean = x.col(j).mean();
    const double var = (x.col(j).array() - mean).square().sum() / (x.rows() - 1);
    CHECK(std::abs(mean) <= 0.05);
    CHECK(std::abs(var - 5.0) <= 0.2);
  }
  CHECK(generate_features(10, cfg, 3) == generate_features(10, cfg, 3));
}

TEST_CASE("true weights are integers in [0, 150] and the bias is zero") {
  const auto cfg = make_dgp(3, 5.0, 4, 2, 4);
  CHECK(cfg.true_weights.rows() == 4);
  CHECK(cfg.true_weights.cols() == 3);
  CHECK(cfg.true_weights.minCoeff() >= 0.0);
  CHECK(cfg.true_weights.maxCoeff() <= 150.0);
  CHECK((cfg.true_weights.array() == cfg.true_weights.array().round()).all());
  CHECK(cfg.true_bias.isZero());
  CHECK(cfg.degree == 2);
}

TEST_CASE("degree one is the plain softmax of the affine map") {
  auto cfg = make_dgp(2, 5.0, 3, 1, 5);
  cfg.true_weights = Matrix{{0.3, -0.1}, {0.0, 0.2}, {-0.4, 0.5}};
  cfg.true_bias = Vector{{0.1, 0.0, -0.2}};
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const Vector x = testing::gaussian_vector(2, rng);
    CHECK((conditional_probs(x, cfg).values() - softmax(cfg.true_weights * x + cfg.true_bias).values()).norm() <=
          1e-15);
  }
}

TEST_CASE("zero weights give feature-independent probabilities") {
  auto cfg = make_dgp(2, 5.0, 3, 3, 7);
  cfg.true_weights.setZero();
  cfg.true_bias = Vector{{0.5, -0.8, 1.1}};
  Vector powered(3);
  for (int k = 0; k < 3; ++k) powered[k] = std::copysign(std::pow(std::abs(cfg.true_bias[k]), 3), cfg.true_bias[k]);
  const Vector want = softmax(powered).values();
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    CHECK((conditional_probs(testing::gaussian_vector(2, rng, 10.0), cfg).values() - want).norm() <= 1e-15);
  }
}

TEST_CASE("signed power") {
  CHECK(signed_power(-2.0, 2) == -4.0);
  CHECK(signed_power(-2.0, 3) == -8.0);
  CHECK(signed_power(3.0, 1) == 3.0);
  CHECK(signed_power(0.0, 4) == 0.0);
}

TEST_CASE("higher degree concentrates the conditional law") {
  // Small weights so that degree 1 is far from one-hot.
  auto one = make_dgp(3, 1.0, 4, 1, 9);
  one.true_weights = Matrix{{0.6, -0.2, 0.1}, {0.1, 0.7, -0.3}, {-0.5, 0.2, 0.4}, {0.2, 0.1, 0.9}};
  one.true_bias = Vector{{0.3, 0.0, -0.1, 0.2}};
  auto three = one;
  three.degree = 3;
  const Matrix x = generate_features(10000, one, 10);
  double m1 = 0.0, m3 = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    const Vector xi = x.row(i).transpose();
    m1 += conditional_probs(xi, one).values().maxCoeff();
    m3 += conditional_probs(xi, three).values().maxCoeff();
  }
  CHECK(m3 > m1);
}

TEST_CASE("label sampling") {
  std::vector<ProbVector> mass(100, ProbVector::vertex(4, 2));
  for (int k : sample_labels(mass, 11)) CHECK(k == 2);

  std::vector<ProbVector> uni(100000, ProbVector::uniform(4));
  const auto labels = sample_labels(uni, 12);
  std::vector<int> counts(4, 0);
  for (int k : labels) ++counts[k];
  for (int k = 0; k < 4; ++k) CHECK(std::abs(counts[k] / 1e5 - 0.25) <= 0.01);
  CHECK(sample_labels(uni, 12) == labels);
}

TEST_CASE("binned label frequencies converge to the binned true probabilities") {
  auto cfg = make_dgp(3, 1.0, 4, 1, 13);
  cfg.true_weights = Matrix{{0.6, -0.2, 0.1}, {0.1, 0.7, -0.3}, {-0.5, 0.2, 0.4}, {0.2, 0.1, 0.9}};
  auto chi2 = [&](int n) {
    const Dataset d = generate_dataset(n, cfg, 14 + static_cast<std::uint64_t>(n));
    Matrix observed = Matrix::Zero(4, 4), expected = Matrix::Zero(4, 4);
    for (int i = 0; i < n; ++i) {
      const Vector p = conditional_probs(d.x(i), cfg).values();
      Eigen::Index bin;
      p.maxCoeff(&bin);
      observed(bin, d.labels[i]) += 1.0;
      expected.row(bin) += p.transpose();
    }
    // Normalized chi-square per sample.
    double s = 0.0;
    for (int b = 0; b < 4; ++b)
      for (int k = 0; k < 4; ++k)
        if (expected(b, k) > 0) s += std::pow(observed(b, k) - expected(b, k), 2) / expected(b, k);
    return s / n;
  };
  CHECK(chi2(100000) < chi2(1000));
}

TEST_CASE("dataset generation is deterministic and uses separate streams") {
  const auto cfg = make_dgp(3, 5.0, 4, 1, 15);
  const auto a = generate_dataset(50, cfg, 16), b = generate_dataset(50, cfg, 16);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.features == generate_features(50, cfg, mix_seed(16, 1)));
  a.validate();
}

TEST_CASE("dgp validation") {
  auto cfg = make_dgp(3, 5.0, 4, 1, 17);
  cfg.degree = 0;
  CHECK_THROWS(cfg.validate());
  cfg.degree = 1;
  cfg.feature_scale = 0.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("dataset split, slice and CSV round trip") {
  const auto d = generate_dataset(50, make_dgp(3, 5.0, 4, 1, 18), 19);
  const auto [train, val] = split_train_validation(d, 0.2);
  CHECK(train.size() == 40);
  CHECK(val.size() == 10);
  CHECK(val.split == Split::Validation);
  CHECK(concatenate(train, val).features == d.features);
  const auto dir = testing::scratch_dir("dataset");
  write_dataset_csv(d, (dir / "d.csv").string());
  const std::string text = testing::read_file(dir / "d.csv");
  CHECK(text.rfind("x_1,x_2,x_3,scenario_index\n", 0) == 0);
  const auto back = read_dataset_csv((dir / "d.csv").string(), 4);
  CHECK(back.labels == d.labels);
  CHECK(back.features == d.features);
  Dataset bad = d;
  bad.labels[0] = 4;
  CHECK_THROWS(bad.validate());
}
