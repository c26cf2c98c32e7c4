#include "iceo/semialgebraic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "iceo/format.hpp"

namespace iceo {

bool PolyhedralDomain::contains(const Vector& x, double tol) const {
  return ((A * x - a).array() >= -tol).all();
}

PolyhedralDomain PolyhedralDomain::box(int p, double lo, double hi) {
  if (p < 1 || !(hi > lo)) throw std::invalid_argument("PolyhedralDomain::box: bad bounds");
  PolyhedralDomain d;
  d.A = Matrix::Zero(2 * p, p);
  d.a.resize(2 * p);
  for (int j = 0; j < p; ++j) {
    d.A(2 * j, j) = 1.0;
    d.a[2 * j] = lo;
    d.A(2 * j + 1, j) = -1.0;
    d.a[2 * j + 1] = -hi;
  }
  return d;
}

namespace {

LinearProgram domain_lp(const PolyhedralDomain& d) {
  LinearProgram lp;
  lp.constraints = d.A;
  lp.senses.assign(static_cast<std::size_t>(d.num_rows()), Sense::Ge);
  lp.rhs = d.a;
  lp.nonnegative.assign(static_cast<std::size_t>(d.dim()), false);
  return lp;
}

}  // namespace

DomainCertificate certify_domain(const PolyhedralDomain& domain) {
  if (domain.A.rows() != domain.a.size() || domain.A.rows() < 1 || domain.A.cols() < 1) {
    throw DomainError("PolyhedralDomain: A and a disagree");
  }
  LinearProgram lp = domain_lp(domain);
  const int p = domain.dim();
  DomainCertificate cert;
  cert.lower.resize(p);
  cert.upper.resize(p);
  for (int j = 0; j < p; ++j) {
    for (int dir : {1, -1}) {
      lp.objective = Vector::Zero(p);
      lp.objective[j] = dir;
      const LpResult r = solve_lp(lp);
      if (r.status == LpStatus::Infeasible) throw DomainError("feature domain is empty");
      if (r.status == LpStatus::Unbounded) throw DomainError("feature domain is unbounded");
      if (r.status != LpStatus::Optimal) throw DomainError("feature domain LP failed numerically");
      (dir == 1 ? cert.lower : cert.upper)[j] = r.x[j];
    }
  }
  // Chebyshev center: max r s.t. A_i x - |A_i| r >= a_i, r >= 0.
  LinearProgram cheb;
  const int m = domain.num_rows();
  cheb.constraints.resize(m, p + 1);
  cheb.constraints.leftCols(p) = domain.A;
  cheb.constraints.col(p) = -domain.A.rowwise().norm();
  cheb.senses.assign(static_cast<std::size_t>(m), Sense::Ge);
  cheb.rhs = domain.a;
  cheb.nonnegative.assign(static_cast<std::size_t>(p + 1), false);
  cheb.nonnegative[static_cast<std::size_t>(p)] = true;
  cheb.objective = Vector::Zero(p + 1);
  cheb.objective[p] = -1.0;
  const LpResult r = solve_lp(cheb);
  if (r.status != LpStatus::Optimal) throw DomainError("Chebyshev center LP failed");
  cert.center = r.x.head(p);
  cert.radius = r.x[p];
  if (!(cert.radius > 1e-12)) throw DomainError("feature domain has empty interior");
  return cert;
}

SimplexMembershipSystem build_membership_system(const PolyhedralDomain& domain, int num_scenarios) {
  if (num_scenarios < 2) throw std::invalid_argument("build_membership_system: need K >= 2");
  SimplexMembershipSystem sys;
  sys.domain = domain;
  sys.num_scenarios = num_scenarios;
  sys.certificate = certify_domain(domain);
  return sys;
}

LinearProgram SimplexMembershipSystem::to_lp(const Matrix& B, const Vector& b) const {
  const int K = num_scenarios;
  const int m = domain.num_rows();
  const int p = domain.dim();
  if (B.rows() != K || B.cols() != p || b.size() != K) {
    throw std::invalid_argument("membership system: (B, b) has the wrong shape");
  }
  const int blocks = K + 2;
  const int rows = blocks * (1 + p);
  LinearProgram lp;
  lp.constraints = Matrix::Zero(rows, blocks * m);
  lp.senses.resize(static_cast<std::size_t>(rows));
  lp.rhs.resize(rows);
  lp.nonnegative.assign(static_cast<std::size_t>(blocks * m), true);

  const Vector col_sums = B.colwise().sum().transpose();
  const double bsum = b.sum();
  int row = 0;
  for (int blk = 0; blk < blocks; ++blk) {
    double ineq_rhs;
    Vector eq_rhs;
    if (blk < K) {
      ineq_rhs = -b[blk];
      eq_rhs = B.row(blk).transpose();
    } else if (blk == K) {
      ineq_rhs = 1.0 - bsum;
      eq_rhs = col_sums;
    } else {
      ineq_rhs = -1.0 + bsum;
      eq_rhs = -col_sums;
    }
    lp.constraints.block(row, blk * m, 1, m) = domain.a.transpose();
    lp.senses[static_cast<std::size_t>(row)] = Sense::Ge;
    lp.rhs[row] = ineq_rhs;
    ++row;
    lp.constraints.block(row, blk * m, p, m) = domain.A.transpose();
    for (int j = 0; j < p; ++j) {
      lp.senses[static_cast<std::size_t>(row + j)] = Sense::Eq;
      lp.rhs[row + j] = eq_rhs[j];
    }
    row += p;
  }
  return lp;
}

std::string to_string(Certification c) {
  switch (c) {
    case Certification::Certified: return "certified";
    case Certification::Infeasible: return "infeasible";
    case Certification::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

FeasibilityResult check_feasibility(const SimplexMembershipSystem& system, const Matrix& B, const Vector& b) {
  const LpResult r = solve_lp(system.to_lp(B, b));
  FeasibilityResult out;
  switch (r.status) {
    case LpStatus::Optimal:
      out.status = Certification::Certified;
      out.aux = r.x;
      break;
    case LpStatus::Infeasible: out.status = Certification::Infeasible; break;
    default: out.status = Certification::NumericalFailure; break;
  }
  return out;
}

bool in_simplex_within(const Vector& v, double tol) {
  return v.minCoeff() >= -tol && std::abs(v.sum() - 1.0) <= tol;
}

std::optional<Vector> falsify_by_sampling(const PolyhedralDomain& domain, const Matrix& B, const Vector& b,
                                          int n_samples, std::uint64_t seed, double tol) {
  if (n_samples < 0) throw std::invalid_argument("falsify_by_sampling: negative sample count");
  if (B.cols() != domain.dim() || B.rows() != b.size()) {
    throw std::invalid_argument("falsify_by_sampling: (B, b) has the wrong shape");
  }
  const DomainCertificate cert = certify_domain(domain);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector x = cert.center;
  const int p = domain.dim();
  for (int s = 0; s < n_samples; ++s) {
    Vector d(p);
    for (int j = 0; j < p; ++j) d[j] = normal(rng);
    const double dn = d.norm();
    if (!(dn > 0.0)) continue;
    d /= dn;
    const Vector Ad = domain.A * d;
    const Vector slack = domain.A * x - domain.a;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < domain.num_rows(); ++i) {
      // slack_i + t Ad_i >= 0
      if (Ad[i] > 1e-14) {
        lo = std::max(lo, -slack[i] / Ad[i]);
      } else if (Ad[i] < -1e-14) {
        hi = std::min(hi, -slack[i] / Ad[i]);
      }
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("hit-and-run chord is unbounded");
    if (hi < lo) continue;
    x += (lo + (hi - lo) * unif(rng)) * d;
    if (!in_simplex_within(B * x + b, tol)) return x;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::vector<Polynomial> surrogate_polynomials(const Surrogate& surrogate, const std::vector<Polynomial>& p) {
  if (static_cast<int>(p.size()) != surrogate.num_scenarios()) {
    throw std::invalid_argument("surrogate_polynomials: need one polynomial per scenario");
  }
  const int d = surrogate.dimension();
  std::vector<Polynomial> out(static_cast<std::size_t>(d));
  if (const auto* bern = dynamic_cast<const BernsteinModel*>(&surrogate)) {
    const auto& idx = bern->multi_indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      Polynomial basis = Polynomial::constant(bern->multinomials()[static_cast<Eigen::Index>(i)]);
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (idx[i][k] > 0) basis = basis * p[k].pow(idx[i][k]);
      }
      for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] += bern->coefficients()(static_cast<Eigen::Index>(i), j) * basis;
    }
    return out;
  }
  if (const auto* krr = dynamic_cast<const KernelModel*>(&surrogate)) {
    const Matrix& P = krr->support();
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      Polynomial inner = Polynomial::constant(krr->offset());
      for (std::size_t k = 0; k < p.size(); ++k) inner += P(i, static_cast<Eigen::Index>(k)) * p[k];
      const Polynomial kern = inner.pow(krr->degree());
      for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] += krr->dual()(i, j) * kern;
    }
    return out;
  }
  throw std::invalid_argument("surrogate_polynomials: surrogate kind '" + surrogate.kind() + "' is not polynomial");
}

namespace {

struct ProgramWriter {
  std::vector<std::pair<std::string, bool>> vars;  // name, nonnegative
  std::vector<std::tuple<std::string, std::string, Polynomial>> constraints;

  int add_var(std::string name, bool nonneg) {
    vars.emplace_back(std::move(name), nonneg);
    return static_cast<int>(vars.size()) - 1;
  }

  static void write_poly(std::ostringstream& os, const Polynomial& poly) {
    os << poly.terms().size() << '\n';
    for (const auto& [mono, coef] : poly.terms()) {
      os << format_double(coef);
      if (mono.empty()) {
        os << " 1";
      } else {
        os << ' ';
        for (std::size_t t = 0; t < mono.size(); ++t) {
          if (t) os << '*';
          os << 'v' << mono[t].first;
          if (mono[t].second != 1) os << '^' << mono[t].second;
        }
      }
      os << '\n';
    }
  }
};

}  // namespace

std::string export_polynomial_program(const ProblemInstance& problem, const Surrogate& surrogate,
                                      const Dataset& data, double rho, const PolyhedralDomain& domain) {
  if (data.empty()) throw std::invalid_argument("export_polynomial_program: empty dataset");
  if (!(rho > 0.0)) throw std::invalid_argument("export_polynomial_program: rho must be > 0");
  const int K = problem.num_scenarios();
  const int p = data.feature_dim();
  const int d = problem.dimension();
  const int n = data.size();
  if (surrogate.num_scenarios() != K || surrogate.dimension() != d || data.num_scenarios != K ||
      domain.dim() != p) {
    throw std::invalid_argument("export_polynomial_program: inconsistent dimensions");
  }
  certify_domain(domain);
  const int m = domain.num_rows();

  ProgramWriter pw;
  std::vector<std::vector<int>> Bv(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(p)));
  std::vector<int> bv(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < p; ++j) Bv[k][j] = pw.add_var("B_" + std::to_string(k + 1) + "_" + std::to_string(j + 1), false);
  }
  for (int k = 0; k < K; ++k) bv[k] = pw.add_var("b_" + std::to_string(k + 1), false);
  std::vector<std::vector<int>> wv(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(d)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) wv[i][j] = pw.add_var("w_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), false);
  }
  const bool newsvendor = problem.kind() == ProblemKind::Newsvendor;
  std::vector<std::vector<int>> tv;
  if (newsvendor) {
    tv.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(d)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) tv[i][j] = pw.add_var("t_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), false);
    }
  }
  auto aux_block = [&](const std::string& prefix) {
    std::vector<int> ids(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l) ids[l] = pw.add_var(prefix + "_" + std::to_string(l + 1), true);
    return ids;
  };
  std::vector<std::vector<int>> yv;
  for (int k = 0; k < K; ++k) yv.push_back(aux_block("y" + std::to_string(k + 1)));
  const std::vector<int> zv = aux_block("z");
  const std::vector<int> uv = aux_block("u");

  auto var = [](int id) { return Polynomial::variable(id); };

  // Objective.
  Polynomial objective;
  const double inv_n = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    const int label = data.labels[static_cast<std::size_t>(i)];
    const Vector& xi = problem.scenarios()[label];
    for (int j = 0; j < d; ++j) objective += (0.5 * rho * inv_n) * var(wv[i][j]).pow(2);
    switch (problem.kind()) {
      case ProblemKind::Newsvendor:
        for (int j = 0; j < d; ++j) objective += inv_n * var(tv[i][j]);
        break;
      case ProblemKind::Portfolio: {
        // alpha (w^T xi - w0)^2 - w^T xi with w0 the last coordinate.
        Polynomial ret;
        for (int j = 0; j + 1 < d; ++j) ret += xi[j] * var(wv[i][j]);
        const Polynomial dev = ret - var(wv[i][d - 1]);
        objective += (inv_n * problem.portfolio_params()->alpha) * dev.pow(2);
        objective -= inv_n * ret;
        break;
      }
      case ProblemKind::Flow:
        for (int j = 0; j < d; ++j) {
          const Polynomial diff = var(wv[i][j]) - Polynomial::constant(problem.flow_params()->target[j]);
          objective += (inv_n * xi[j]) * diff.pow(2);
        }
        break;
    }
  }

  // Surrogate equality constraints, w_i = w~(B x_i + b).
  for (int i = 0; i < n; ++i) {
    std::vector<Polynomial> f(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      f[k] = var(bv[k]);
      for (int j = 0; j < p; ++j) f[k] += data.features(i, j) * var(Bv[k][j]);
    }
    const std::vector<Polynomial> ws = surrogate_polynomials(surrogate, f);
    for (int j = 0; j < d; ++j) {
      Polynomial c = var(wv[i][j]) - ws[j];
      c.prune(1e-15);
      pw.constraints.emplace_back("surrogate_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), "eq", c);
    }
  }
  if (newsvendor) {
    const auto& np = *problem.newsvendor_params();
    for (int i = 0; i < n; ++i) {
      const Vector& xi = problem.scenarios()[data.labels[static_cast<std::size_t>(i)]];
      for (int j = 0; j < d; ++j) {
        const std::string tag = std::to_string(i + 1) + "_" + std::to_string(j + 1);
        pw.constraints.emplace_back("holding_" + tag, "ge",
                                    var(tv[i][j]) - np.holding[j] * (var(wv[i][j]) - Polynomial::constant(xi[j])));
        pw.constraints.emplace_back("stockout_" + tag, "ge",
                                    var(tv[i][j]) - np.stockout[j] * (Polynomial::constant(xi[j]) - var(wv[i][j])));
      }
    }
  }

  // Membership system.
  auto dot_a = [&](const std::vector<int>& ids) {
    Polynomial s;
    for (int l = 0; l < m; ++l) s += domain.a[l] * var(ids[l]);
    return s;
  };
  auto At_row = [&](const std::vector<int>& ids, int j) {
    Polynomial s;
    for (int l = 0; l < m; ++l) s += domain.A(l, j) * var(ids[l]);
    return s;
  };
  Polynomial bsum;
  for (int k = 0; k < K; ++k) bsum += var(bv[k]);
  for (int k = 0; k < K; ++k) {
    const std::string tag = std::to_string(k + 1);
    pw.constraints.emplace_back("member_y" + tag, "ge", dot_a(yv[k]) + var(bv[k]));
    for (int j = 0; j < p; ++j) {
      pw.constraints.emplace_back("member_y" + tag + "_" + std::to_string(j + 1), "eq", At_row(yv[k], j) - var(Bv[k][j]));
    }
  }
  pw.constraints.emplace_back("member_z", "ge", dot_a(zv) + bsum - Polynomial::constant(1.0));
  pw.constraints.emplace_back("member_u", "ge", dot_a(uv) - bsum + Polynomial::constant(1.0));
  for (int j = 0; j < p; ++j) {
    Polynomial colsum;
    for (int k = 0; k < K; ++k) colsum += var(Bv[k][j]);
    pw.constraints.emplace_back("member_z_" + std::to_string(j + 1), "eq", At_row(zv, j) - colsum);
    pw.constraints.emplace_back("member_u_" + std::to_string(j + 1), "eq", At_row(uv, j) + colsum);
  }

  std::ostringstream os;
  os << "iceo-polyprog 1\n";
  os << "variables " << pw.vars.size() << '\n';
  for (std::size_t v = 0; v < pw.vars.size(); ++v) {
    os << 'v' << v << ' ' << pw.vars[v].first << ' ' << (pw.vars[v].second ? "nonneg" : "free") << '\n';
  }
  os << "objective minimize ";
  ProgramWriter::write_poly(os, objective);
  os << "constraints " << pw.constraints.size() << '\n';
  for (const auto& [name, sense, poly] : pw.constraints) {
    os << "constraint " << name << ' ' << sense << ' ';
    ProgramWriter::write_poly(os, poly);
  }
  os << "end\n";
  return os.str();
}

}  // namespace iceo
