#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "iceo/adam.hpp"
#include "iceo/surrogate.hpp"

namespace iceo {

MlpSurrogate::MlpSurrogate(Matrix w1, Vector b1, Matrix w2, Vector b2)
    : w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(std::move(b2)) {
  if (w1_.rows() != b1_.size() || w2_.cols() != w1_.rows() || w2_.rows() != b2_.size()) {
    throw std::invalid_argument("MlpSurrogate: inconsistent layer shapes");
  }
}

Vector MlpSurrogate::evaluate_at(const Vector& p) const {
  if (p.size() != w1_.cols()) throw std::invalid_argument("MlpSurrogate: wrong input length");
  const Vector h = (w1_ * p + b1_).array().tanh().matrix();
  return w2_ * h + b2_;
}

SurrogateEval MlpSurrogate::evaluate_with_jacobian_at(const Vector& p) const {
  if (p.size() != w1_.cols()) throw std::invalid_argument("MlpSurrogate: wrong input length");
  const Vector h = (w1_ * p + b1_).array().tanh().matrix();
  const Vector dh = (1.0 - h.array().square()).matrix();
  SurrogateEval out;
  out.value = w2_ * h + b2_;
  out.jacobian = w2_ * dh.asDiagonal() * w1_;
  return out;
}

nlohmann::json MlpSurrogate::to_json() const {
  return {{"kind", kind()},
          {"hidden", hidden()},
          {"w1", matrix_to_json(w1_)},
          {"b1", vector_to_json(b1_)},
          {"w2", matrix_to_json(w2_)},
          {"b2", vector_to_json(b2_)}};
}

double MlpSurrogate::lipschitz_bound() const {
  Eigen::JacobiSVD<Matrix> s1(w1_);
  Eigen::JacobiSVD<Matrix> s2(w2_);
  return s1.singularValues()[0] * s2.singularValues()[0];
}

namespace {

// Flat parameter layout: w1 (col-major), b1, w2 (col-major), b2.
struct Layout {
  Eigen::Index K, H, d;
  Eigen::Index size() const { return H * K + H + d * H + d; }
};

}  // namespace

MlpFitResult mlp_fit(const std::vector<SurrogateSample>& samples, const MlpFitConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("mlp_fit: empty sample set");
  if (cfg.hidden < 1 || cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.lr > 0.0)) {
    throw std::invalid_argument("mlp_fit: bad configuration");
  }
  const auto m = static_cast<Eigen::Index>(samples.size());
  const Layout L{samples.front().p.size(), cfg.hidden, samples.front().w.size()};

  Matrix inputs(L.K, m);
  Matrix targets(L.d, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    inputs.col(i) = samples[static_cast<std::size_t>(i)].p.values();
    targets.col(i) = samples[static_cast<std::size_t>(i)].w;
  }
  const Matrix inv_scale = targets.cwiseAbs().cwiseMax(cfg.mape_floor).cwiseInverse();

  // Outputs are produced as mean + spread * (W2 h + b2) during training and
  // folded back into plain layers at the end.
  const Vector out_mean = targets.rowwise().mean();
  Vector out_spread = ((targets.colwise() - out_mean).cwiseAbs2().rowwise().mean()).cwiseSqrt();
  out_spread = out_spread.cwiseMax(1e-6);

  Rng rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector theta(L.size());
  {
    Eigen::Index o = 0;
    const double s1 = 2.0 * std::sqrt(static_cast<double>(L.K));
    for (Eigen::Index i = 0; i < L.H * L.K; ++i) theta[o++] = s1 * normal(rng);
    for (Eigen::Index i = 0; i < L.H; ++i) theta[o++] = 0.5 * normal(rng);
    const double s2 = 1.0 / std::sqrt(static_cast<double>(L.H));
    for (Eigen::Index i = 0; i < L.d * L.H; ++i) theta[o++] = s2 * normal(rng);
    for (Eigen::Index i = 0; i < L.d; ++i) theta[o++] = 0.0;
  }

  auto unpack = [&L](const Vector& t) {
    Eigen::Index o = 0;
    Matrix w1 = Eigen::Map<const Matrix>(t.data() + o, L.H, L.K);
    o += L.H * L.K;
    Vector b1 = t.segment(o, L.H);
    o += L.H;
    Matrix w2 = Eigen::Map<const Matrix>(t.data() + o, L.d, L.H);
    o += L.d * L.H;
    Vector b2 = t.segment(o, L.d);
    return std::tuple{std::move(w1), std::move(b1), std::move(w2), std::move(b2)};
  };

  Adam adam(L.size(), AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(cfg.epochs));
  Vector grad(L.size());
  const double pi = std::acos(-1.0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    // Cosine decay to 5% of the base rate.
    const double frac = cfg.epochs > 1 ? static_cast<double>(epoch) / (cfg.epochs - 1) : 0.0;
    const double lr = cfg.lr * (0.05 + 0.95 * 0.5 * (1.0 + std::cos(pi * frac)));
    double epoch_loss = 0.0;
    for (Eigen::Index start = 0; start < m; start += cfg.batch_size) {
      const Eigen::Index bsz = std::min<Eigen::Index>(cfg.batch_size, m - start);
      Matrix p(L.K, bsz), w(L.d, bsz), sc(L.d, bsz);
      for (Eigen::Index b = 0; b < bsz; ++b) {
        const auto i = order[static_cast<std::size_t>(start + b)];
        p.col(b) = inputs.col(i);
        w.col(b) = targets.col(i);
        sc.col(b) = inv_scale.col(i);
      }
      auto [w1, b1, w2, b2] = unpack(theta);
      const Matrix h = ((w1 * p).colwise() + b1).array().tanh().matrix();
      const Matrix raw = (w2 * h).colwise() + b2;
      const Matrix y = (out_spread.asDiagonal() * raw).colwise() + out_mean;
      const Matrix err = y - w;
      const double norm = 1.0 / static_cast<double>(bsz * L.d);
      epoch_loss += (err.cwiseAbs().cwiseProduct(sc)).sum();
      // d loss / d raw
      const Matrix g_raw =
          out_spread.asDiagonal() * (err.array().sign() * sc.array() * norm).matrix();
      const Matrix g_w2 = g_raw * h.transpose();
      const Vector g_b2 = g_raw.rowwise().sum();
      const Matrix g_a = ((w2.transpose() * g_raw).array() * (1.0 - h.array().square())).matrix();
      const Matrix g_w1 = g_a * p.transpose();
      const Vector g_b1 = g_a.rowwise().sum();
      Eigen::Index o = 0;
      grad.segment(o, L.H * L.K) = Eigen::Map<const Vector>(g_w1.data(), L.H * L.K);
      o += L.H * L.K;
      grad.segment(o, L.H) = g_b1;
      o += L.H;
      grad.segment(o, L.d * L.H) = Eigen::Map<const Vector>(g_w2.data(), L.d * L.H);
      o += L.d * L.H;
      grad.segment(o, L.d) = g_b2;
      adam.step(theta, grad, lr);
    }
    epoch_loss /= static_cast<double>(m * L.d);
    if (!std::isfinite(epoch_loss) || !theta.allFinite()) {
      throw TrainingDivergence("mlp_fit: loss became non-finite at epoch " + std::to_string(epoch), epoch,
                               trace);
    }
    trace.push_back(epoch_loss);
  }

  auto [w1, b1, w2, b2] = unpack(theta);
  Matrix w2_out = out_spread.asDiagonal() * w2;
  Vector b2_out = out_mean + out_spread.cwiseProduct(b2);
  return {MlpSurrogate(std::move(w1), std::move(b1), std::move(w2_out), std::move(b2_out)),
          std::move(trace)};
}

SurrogateEval mlp_eval(const MlpSurrogate& model, const ProbVector& p) {
  return model.evaluate_with_jacobian(p);
}

}  // namespace iceo
