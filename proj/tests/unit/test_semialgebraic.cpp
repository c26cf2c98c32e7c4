#include <doctest.h>

#include <sstream>

#include "iceo/datagen.hpp"
#include "iceo/semialgebraic.hpp"
#include "test_support.hpp"

using namespace iceo;

namespace {

struct Instance {
  Matrix B;
  Vector b;
};

/// b inside the simplex, B with zero column sums scaled by `scale` relative to
/// the largest scaling that keeps B x + b >= 0 on the box [-1, 1]^p.
Instance box_instance(int K, int p, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector b = Vector::NullaryExpr(K, [&] { return 0.2 + std::abs(u(rng)); });
  b /= b.sum();
  Matrix B = Matrix::NullaryExpr(K, p, [&] { return u(rng); });
  B.rowwise() -= B.colwise().mean();
  const Vector reach = B.cwiseAbs().rowwise().sum();
  B *= scale * (b.array() / reach.array()).minCoeff();
  return {B, b};
}

/// Closed form on a box: min over x of (B x + b)_k is b_k - sum_j |B_kj|.
bool box_member(const Instance& in) {
  const Vector lowest = in.b - in.B.cwiseAbs().rowwise().sum();
  const Vector sums = in.B.colwise().sum().transpose();
  return lowest.minCoeff() >= -1e-12 && sums.cwiseAbs().maxCoeff() <= 1e-12 && std::abs(in.b.sum() - 1.0) <= 1e-12;
}

PolyhedralDomain unit_interval() { return {Matrix{{1.0}, {-1.0}}, Vector{{0.0, -1.0}}}; }

}  // namespace

TEST_CASE("system size on the unit interval with two scenarios") {
  const auto sys = build_membership_system(unit_interval(), 2);
  CHECK(sys.num_aux_variables() == 8);
  CHECK(sys.num_inequalities() == 4);
  CHECK(sys.num_equalities() == 4);
  const LinearProgram lp = sys.to_lp(Matrix::Zero(2, 1), Vector::Constant(2, 0.5));
  CHECK(lp.num_vars() == 8);
  CHECK(lp.constraints.rows() == 8);
}

TEST_CASE("a constant hypothesis on the simplex is certified with zero multipliers") {
  const auto sys = build_membership_system(PolyhedralDomain::box(3, -1.0, 1.0), 4);
  const auto r = check_feasibility(sys, Matrix::Zero(4, 3), Vector::Constant(4, 0.25));
  CHECK(r.status == Certification::Certified);
  CHECK(r.aux.size() == sys.num_aux_variables());
}

TEST_CASE("LP certification agrees with the closed-form box condition") {
  const auto domain = PolyhedralDomain::box(3, -1.0, 1.0);
  const auto sys = build_membership_system(domain, 4);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> scale(0.0, 2.0);
  for (int t = 0; t < 60; ++t) {
    double s = scale(rng);
    if (std::abs(s - 1.0) < 0.02) s = 0.5;
    const Instance in = box_instance(4, 3, s, rng);
    const auto r = check_feasibility(sys, in.B, in.b);
    CHECK((r.status == Certification::Certified) == box_member(in));
  }
}

TEST_CASE("certified instances survive 1e4 samples") {
  const auto domain = PolyhedralDomain::box(3, -1.0, 1.0);
  const auto sys = build_membership_system(domain, 4);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const Instance in = box_instance(4, 3, 1.0, rng);
    REQUIRE(check_feasibility(sys, in.B, in.b).status == Certification::Certified);
    CHECK_FALSE(falsify_by_sampling(domain, in.B, in.b, 10000, 100 + t).has_value());
  }
}

TEST_CASE("scaled violators are rejected and falsified") {
  const auto domain = PolyhedralDomain::box(3, -1.0, 1.0);
  const auto sys = build_membership_system(domain, 4);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const Instance in = box_instance(4, 3, 10.0, rng);
    CHECK(check_feasibility(sys, in.B, in.b).status == Certification::Infeasible);
    const auto hit = falsify_by_sampling(domain, in.B, in.b, 10000, 200 + t);
    REQUIRE(hit.has_value());
    CHECK(domain.contains(*hit));
    CHECK_FALSE(in_simplex_within(in.B * *hit + in.b, 1e-9));
  }
  // Column sums off zero break the sum-to-one condition.
  Instance bad = box_instance(4, 3, 0.5, rng);
  bad.B(0, 0) += 0.01;
  CHECK(check_feasibility(sys, bad.B, bad.b).status == Certification::Infeasible);
}

TEST_CASE("certification is invariant under row permutation of the domain") {
  const auto domain = PolyhedralDomain::box(2, -1.0, 1.0);
  PolyhedralDomain perm = domain;
  const std::vector<int> order = {3, 0, 2, 1};
  for (int i = 0; i < 4; ++i) {
    perm.A.row(i) = domain.A.row(order[i]);
    perm.a[i] = domain.a[order[i]];
  }
  const auto s1 = build_membership_system(domain, 3);
  const auto s2 = build_membership_system(perm, 3);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const Instance in = box_instance(3, 2, t < 5 ? 0.9 : 1.5, rng);
    CHECK(check_feasibility(s1, in.B, in.b).status == check_feasibility(s2, in.B, in.b).status);
  }
}

TEST_CASE("certificate on a triangle domain") {
  // x >= 0, y >= 0, x + y <= 1
  const PolyhedralDomain tri{Matrix{{1.0, 0.0}, {0.0, 1.0}, {-1.0, -1.0}}, Vector{{0.0, 0.0, -1.0}}};
  const auto cert = certify_domain(tri);
  CHECK(cert.lower.isZero(1e-9));
  CHECK((cert.upper - Vector::Ones(2)).norm() <= 1e-9);
  // Inradius of the right triangle with legs 1.
  CHECK(cert.radius == doctest::Approx(1.0 / (2.0 + std::sqrt(2.0))).epsilon(1e-9));
  CHECK(tri.contains(cert.center));
  // The affine map (x, y) -> (x, y, 1 - x - y) is a simplex point on the triangle.
  const auto sys = build_membership_system(tri, 3);
  const Matrix B{{1.0, 0.0}, {0.0, 1.0}, {-1.0, -1.0}};
  const Vector b{{0.0, 0.0, 1.0}};
  CHECK(check_feasibility(sys, B, b).status == Certification::Certified);
  CHECK_FALSE(falsify_by_sampling(tri, B, b, 10000, 5).has_value());
  CHECK(check_feasibility(sys, 1.2 * B, b).status == Certification::Infeasible);
}

TEST_CASE("empty, unbounded and flat domains are rejected") {
  const PolyhedralDomain empty{Matrix{{1.0}, {-1.0}}, Vector{{1.0, 0.0}}};
  const PolyhedralDomain unbounded{Matrix{{1.0}}, Vector{{0.0}}};
  const PolyhedralDomain flat{Matrix{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}},
                              Vector{{0.0, 0.0, 0.0, -1.0}}};
  CHECK_THROWS_AS(certify_domain(empty), DomainError);
  CHECK_THROWS_AS(certify_domain(unbounded), DomainError);
  CHECK_THROWS_AS(certify_domain(flat), DomainError);
  CHECK_THROWS_AS(build_membership_system(unbounded, 2), DomainError);
}

TEST_CASE("sampling stream is seed deterministic") {
  const auto domain = PolyhedralDomain::box(2, -1.0, 1.0);
  std::mt19937_64 rng(6);
  const Instance in = box_instance(3, 2, 3.0, rng);
  const auto a = falsify_by_sampling(domain, in.B, in.b, 1000, 7);
  const auto b = falsify_by_sampling(domain, in.B, in.b, 1000, 7);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(*a == *b);
}

TEST_CASE("surrogate polynomials reproduce surrogate values") {
  const auto nv = default_newsvendor();
  const OracleConfig ocfg{.rho = 0.01};
  const auto samples = generate_surrogate_samples(nv, ocfg, 30, 0.0, 8);
  const KernelModel krr = krr_fit(samples, 2, 1.0, 1e-3);
  const BernsteinModel bern = bernstein_fit(nv, ocfg, 3);
  std::vector<Polynomial> vars;
  for (int k = 0; k < 4; ++k) vars.push_back(Polynomial::variable(k));
  std::mt19937_64 rng(9);
  for (const Surrogate* s : {static_cast<const Surrogate*>(&krr), static_cast<const Surrogate*>(&bern)}) {
    const auto polys = surrogate_polynomials(*s, vars);
    REQUIRE(polys.size() == 2);
    for (int t = 0; t < 10; ++t) {
      const Vector p = testing::interior_point(4, rng);
      const std::vector<double> pv(p.data(), p.data() + 4);
      const Vector want = s->evaluate_at(p);
      for (int j = 0; j < 2; ++j) CHECK(polys[j].evaluate(pv) == doctest::Approx(want[j]).epsilon(1e-9));
    }
  }
  const MlpSurrogate mlp(Matrix::Zero(2, 4), Vector::Zero(2), Matrix::Zero(2, 2), Vector::Zero(2));
  CHECK_THROWS(surrogate_polynomials(mlp, vars));
}

TEST_CASE("polynomial program export is stable and well formed") {
  const auto nv = default_newsvendor();
  const OracleConfig ocfg{.rho = 0.01};
  const auto samples = generate_surrogate_samples(nv, ocfg, 30, 0.0, 10);
  const KernelModel krr = krr_fit(samples, 2, 1.0, 1e-3);
  const auto data = generate_dataset(5, make_dgp(3, 5.0, 4, 1, 11), 12);
  const auto domain = PolyhedralDomain::box(3, -1.0, 1.0);
  const std::string a = export_polynomial_program(nv, krr, data, 0.01, domain);
  const std::string b = export_polynomial_program(nv, krr, data, 0.01, domain);
  CHECK(a == b);

  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iceo-polyprog 1");
  std::getline(in, line);
  REQUIRE(line.rfind("variables ", 0) == 0);
  const int nvars = std::stoi(line.substr(10));
  // B (4x3), b (4), w and epigraph t (5x2 each), y, z, u ((4+2) x 6 rows).
  CHECK(nvars == 12 + 4 + 10 + 10 + 36);
  for (int i = 0; i < nvars; ++i) {
    std::getline(in, line);
    CHECK(line.rfind("v" + std::to_string(i) + " ", 0) == 0);
  }
  CHECK(a.find("\nobjective minimize ") != std::string::npos);
  CHECK(a.size() > 4);
  CHECK(a.substr(a.size() - 4) == "end\n");
}
