#include "iceo/hypothesis.hpp"

#include <cmath>

#include "iceo/json_io.hpp"

namespace iceo {

namespace {

Vector flatten_row_major(const Matrix& m) {
  Vector out(m.size());
  Eigen::Index o = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[o++] = m(i, j);
  }
  return out;
}

void fill_row_major(Matrix& m, const Vector& theta, Eigen::Index& o) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = theta[o++];
  }
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

}  // namespace

void Hypothesis::check_input(const Vector& x) const {
  if (x.size() != feature_dim()) {
    throw std::invalid_argument("hypothesis: feature dimension mismatch (got " + std::to_string(x.size()) +
                                ", expected " + std::to_string(feature_dim()) + ")");
  }
  if (!x.allFinite()) throw std::invalid_argument("hypothesis: non-finite feature vector");
}

ProbVector Hypothesis::forward(const Vector& x) const { return softmax(logits(x)); }

Matrix softmax_differential(const Vector& f) {
  Matrix d = -f * f.transpose();
  d.diagonal() += f;
  return d;
}

Matrix Hypothesis::param_jacobian(const Vector& x) const {
  const ProbVector f = forward(x);
  return softmax_differential(f.values()) * logits_param_jacobian(x);
}

Vector Hypothesis::vjp(const Vector& x, const Vector& u) const {
  const ProbVector f = forward(x);
  // (diag(f) - f f^T) u, the softmax differential is symmetric.
  const Vector g = f.values().cwiseProduct(u) - f.values() * f.values().dot(u);
  return logits_vjp(x, g);
}

// ---------------------------------------------------------------------------

SoftmaxLinearHypothesis::SoftmaxLinearHypothesis(Matrix weights, Vector bias)
    : weights_(std::move(weights)), bias_(std::move(bias)) {
  if (weights_.rows() != bias_.size() || weights_.rows() < 2) {
    throw std::invalid_argument("SoftmaxLinearHypothesis: need K >= 2 rows matching the bias");
  }
}

SoftmaxLinearHypothesis SoftmaxLinearHypothesis::zeros(int num_scenarios, int feature_dim) {
  return {Matrix::Zero(num_scenarios, feature_dim), Vector::Zero(num_scenarios)};
}

SoftmaxLinearHypothesis SoftmaxLinearHypothesis::random(int num_scenarios, int feature_dim,
                                                        std::uint64_t seed, double scale) {
  Rng rng(seed);
  Matrix w = gaussian_matrix(num_scenarios, feature_dim, rng, scale);
  Vector b = gaussian_matrix(num_scenarios, 1, rng, scale);
  return {std::move(w), std::move(b)};
}

std::unique_ptr<Hypothesis> SoftmaxLinearHypothesis::clone() const {
  return std::make_unique<SoftmaxLinearHypothesis>(*this);
}

Vector SoftmaxLinearHypothesis::params() const {
  Vector theta(num_params());
  theta.head(weights_.size()) = flatten_row_major(weights_);
  theta.tail(bias_.size()) = bias_;
  return theta;
}

void SoftmaxLinearHypothesis::set_params(const Vector& theta) {
  if (theta.size() != num_params()) throw std::invalid_argument("set_params: wrong parameter count");
  Eigen::Index o = 0;
  fill_row_major(weights_, theta, o);
  bias_ = theta.tail(bias_.size());
}

Vector SoftmaxLinearHypothesis::logits(const Vector& x) const {
  check_input(x);
  return weights_ * x + bias_;
}

Matrix SoftmaxLinearHypothesis::logits_param_jacobian(const Vector& x) const {
  check_input(x);
  const auto K = weights_.rows();
  const auto p = weights_.cols();
  Matrix j = Matrix::Zero(K, num_params());
  for (Eigen::Index k = 0; k < K; ++k) {
    j.block(k, k * p, 1, p) = x.transpose();
    j(k, K * p + k) = 1.0;
  }
  return j;
}

Vector SoftmaxLinearHypothesis::logits_vjp(const Vector& x, const Vector& g) const {
  const auto K = weights_.rows();
  const auto p = weights_.cols();
  Vector out(num_params());
  for (Eigen::Index k = 0; k < K; ++k) out.segment(k * p, p) = g[k] * x;
  out.tail(K) = g;
  return out;
}

nlohmann::json SoftmaxLinearHypothesis::to_json() const {
  return {{"kind", kind()}, {"weights", matrix_to_json(weights_)}, {"bias", vector_to_json(bias_)}};
}

// ---------------------------------------------------------------------------

SoftmaxMlpHypothesis::SoftmaxMlpHypothesis(Matrix w1, Vector b1, Matrix w2, Vector b2)
    : w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(std::move(b2)) {
  if (w1_.rows() != b1_.size() || w2_.cols() != w1_.rows() || w2_.rows() != b2_.size() || w2_.rows() < 2) {
    throw std::invalid_argument("SoftmaxMlpHypothesis: inconsistent layer shapes");
  }
}

SoftmaxMlpHypothesis SoftmaxMlpHypothesis::random(int num_scenarios, int feature_dim, int hidden,
                                                  std::uint64_t seed, double scale) {
  Rng rng(seed);
  Matrix w1 = gaussian_matrix(hidden, feature_dim, rng, scale);
  Vector b1 = gaussian_matrix(hidden, 1, rng, scale);
  Matrix w2 = gaussian_matrix(num_scenarios, hidden, rng, scale);
  Vector b2 = gaussian_matrix(num_scenarios, 1, rng, scale);
  return {std::move(w1), std::move(b1), std::move(w2), std::move(b2)};
}

std::unique_ptr<Hypothesis> SoftmaxMlpHypothesis::clone() const {
  return std::make_unique<SoftmaxMlpHypothesis>(*this);
}

Vector SoftmaxMlpHypothesis::params() const {
  Vector theta(num_params());
  Eigen::Index o = 0;
  theta.segment(o, w1_.size()) = flatten_row_major(w1_);
  o += w1_.size();
  theta.segment(o, b1_.size()) = b1_;
  o += b1_.size();
  theta.segment(o, w2_.size()) = flatten_row_major(w2_);
  o += w2_.size();
  theta.segment(o, b2_.size()) = b2_;
  return theta;
}

void SoftmaxMlpHypothesis::set_params(const Vector& theta) {
  if (theta.size() != num_params()) throw std::invalid_argument("set_params: wrong parameter count");
  Eigen::Index o = 0;
  fill_row_major(w1_, theta, o);
  b1_ = theta.segment(o, b1_.size());
  o += b1_.size();
  fill_row_major(w2_, theta, o);
  b2_ = theta.segment(o, b2_.size());
}

Vector SoftmaxMlpHypothesis::logits(const Vector& x) const {
  check_input(x);
  const Vector h = (w1_ * x + b1_).array().tanh().matrix();
  return w2_ * h + b2_;
}

Matrix SoftmaxMlpHypothesis::logits_param_jacobian(const Vector& x) const {
  check_input(x);
  const auto H = w1_.rows();
  const auto p = w1_.cols();
  const auto K = w2_.rows();
  const Vector h = (w1_ * x + b1_).array().tanh().matrix();
  const Vector dh = (1.0 - h.array().square()).matrix();
  Matrix j = Matrix::Zero(K, num_params());
  const Eigen::Index ob1 = H * p, ow2 = ob1 + H, ob2 = ow2 + K * H;
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index a = 0; a < H; ++a) {
      const double s = w2_(k, a) * dh[a];
      j.block(k, a * p, 1, p) = s * x.transpose();
      j(k, ob1 + a) = s;
    }
    j.block(k, ow2 + k * H, 1, H) = h.transpose();
    j(k, ob2 + k) = 1.0;
  }
  return j;
}

Vector SoftmaxMlpHypothesis::logits_vjp(const Vector& x, const Vector& g) const {
  const auto H = w1_.rows();
  const auto p = w1_.cols();
  const auto K = w2_.rows();
  const Vector h = (w1_ * x + b1_).array().tanh().matrix();
  const Vector ga = ((w2_.transpose() * g).array() * (1.0 - h.array().square())).matrix();
  Vector out(num_params());
  Eigen::Index o = 0;
  for (Eigen::Index a = 0; a < H; ++a) out.segment(o + a * p, p) = ga[a] * x;
  o += H * p;
  out.segment(o, H) = ga;
  o += H;
  for (Eigen::Index k = 0; k < K; ++k) out.segment(o + k * H, H) = g[k] * h;
  o += K * H;
  out.segment(o, K) = g;
  return out;
}

nlohmann::json SoftmaxMlpHypothesis::to_json() const {
  return {{"kind", kind()},
          {"w1", matrix_to_json(w1_)},
          {"b1", vector_to_json(b1_)},
          {"w2", matrix_to_json(w2_)},
          {"b2", vector_to_json(b2_)}};
}

std::unique_ptr<Hypothesis> hypothesis_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "softmax-linear") {
    return std::make_unique<SoftmaxLinearHypothesis>(matrix_from_json(j.at("weights")),
                                                     vector_from_json(j.at("bias")));
  }
  if (kind == "softmax-mlp") {
    return std::make_unique<SoftmaxMlpHypothesis>(matrix_from_json(j.at("w1")), vector_from_json(j.at("b1")),
                                                  matrix_from_json(j.at("w2")), vector_from_json(j.at("b2")));
  }
  throw std::invalid_argument("unknown hypothesis kind: " + kind);
}

CrossEntropy cross_entropy_loss(const ProbVector& f_x, int k) {
  if (k < 0 || k >= f_x.size()) throw std::out_of_range("cross_entropy_loss: scenario index out of range");
  const double fk = f_x[k] + kCrossEntropyEps;
  CrossEntropy out{-std::log(fk), Vector::Zero(f_x.size())};
  out.gradient[k] = -1.0 / fk;
  return out;
}

CrossEntropy cross_entropy_with_gradient(const Hypothesis& h, const Vector& x, int k) {
  const CrossEntropy outer = cross_entropy_loss(h.forward(x), k);
  return {outer.value, h.vjp(x, outer.gradient)};
}

}  // namespace iceo
