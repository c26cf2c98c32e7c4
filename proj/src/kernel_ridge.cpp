#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "iceo/surrogate.hpp"

namespace iceo {

KernelModel::KernelModel(int degree, double offset, double ridge, Matrix support, Matrix dual)
    : degree_(degree), offset_(offset), ridge_(ridge), support_(std::move(support)), dual_(std::move(dual)) {
  if (degree_ < 1) throw std::invalid_argument("KernelModel: degree must be >= 1");
  if (offset_ < 0.0) throw std::invalid_argument("KernelModel: offset must be >= 0");
  if (support_.rows() != dual_.rows()) throw std::invalid_argument("KernelModel: support/dual size mismatch");
}

Vector KernelModel::evaluate_at(const Vector& p) const {
  if (p.size() != support_.cols()) throw std::invalid_argument("KernelModel: wrong input length");
  const Vector k = ((support_ * p).array() + offset_).pow(degree_).matrix();
  return dual_.transpose() * k;
}

SurrogateEval KernelModel::evaluate_with_jacobian_at(const Vector& p) const {
  if (p.size() != support_.cols()) throw std::invalid_argument("KernelModel: wrong input length");
  const Eigen::ArrayXd base = (support_ * p).array() + offset_;
  const Vector k = base.pow(degree_).matrix();
  const Vector dk = (degree_ * base.pow(degree_ - 1)).matrix();
  SurrogateEval out;
  out.value = dual_.transpose() * k;
  out.jacobian = dual_.transpose() * (dk.asDiagonal() * support_);
  return out;
}

nlohmann::json KernelModel::to_json() const {
  return {{"kind", kind()},   {"degree", degree_},
          {"offset", offset_}, {"ridge", ridge_},
          {"support", matrix_to_json(support_)}, {"dual", matrix_to_json(dual_)}};
}

Matrix polynomial_gram(const Matrix& support, int degree, double offset) {
  Matrix g = support * support.transpose();
  g.array() = (g.array() + offset).pow(degree);
  return g;
}

double gram_min_eigenvalue(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

KernelModel krr_fit(const std::vector<SurrogateSample>& samples, int degree, double offset, double ridge,
                    int psd_check_limit) {
  const auto m = static_cast<Eigen::Index>(samples.size());
  if (m < 2) throw std::invalid_argument("krr_fit: need at least 2 samples");
  if (!(ridge > 0.0)) throw std::invalid_argument("krr_fit: ridge weight must be positive");
  const auto K = samples.front().p.size();
  const auto d = samples.front().w.size();
  Matrix support(m, K);
  Matrix targets(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    support.row(i) = samples[static_cast<std::size_t>(i)].p.values().transpose();
    targets.row(i) = samples[static_cast<std::size_t>(i)].w.transpose();
  }
  Matrix gram = polynomial_gram(support, degree, offset);
  if (m <= psd_check_limit && gram_min_eigenvalue(gram) < -1e-8) {
    throw std::runtime_error("krr_fit: Gram matrix is not positive semidefinite");
  }
  gram.diagonal().array() += static_cast<double>(m) * ridge;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("krr_fit: regularized Gram matrix is singular");
  Matrix dual = llt.solve(targets);
  if (!dual.allFinite()) throw std::runtime_error("krr_fit: non-finite dual coefficients");
  return KernelModel(degree, offset, ridge, std::move(support), std::move(dual));
}

SurrogateEval krr_eval(const KernelModel& model, const ProbVector& p) {
  return model.evaluate_with_jacobian(p);
}

}  // namespace iceo
