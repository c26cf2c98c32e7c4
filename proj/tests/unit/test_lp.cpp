#include <doctest.h>

#include "iceo/lp.hpp"
#include "test_support.hpp"

using namespace iceo;

TEST_CASE("small LP with a known optimum") {
  // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3, x, y >= 0  -> (3, 1), value 11
  LinearProgram lp{Matrix{{1.0, 1.0}, {1.0, 3.0}, {1.0, 0.0}},
                   {Sense::Le, Sense::Le, Sense::Le},
                   Vector{{4.0, 6.0, 3.0}},
                   Vector{{-3.0, -2.0}},
                   {true, true}};
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.x[1] == doctest::Approx(1.0));
  CHECK(r.objective == doctest::Approx(-11.0));
}

TEST_CASE("equality and free variables") {
  // min x + y  s.t. x - y = -2, x >= -5 (free x), y >= 0  -> x = -5 would need y = -3; optimum y = 0, x = -2
  LinearProgram lp{Matrix{{1.0, -1.0}, {1.0, 0.0}}, {Sense::Eq, Sense::Ge}, Vector{{-2.0, -5.0}},
                   Vector{{1.0, 1.0}}, {false, true}};
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(-2.0));
  CHECK(r.x[1] == doctest::Approx(0.0));
}

TEST_CASE("infeasible and unbounded programs") {
  LinearProgram inf{Matrix{{1.0}, {1.0}}, {Sense::Le, Sense::Ge}, Vector{{1.0, 2.0}}, Vector{}, {true}};
  CHECK(solve_lp(inf).status == LpStatus::Infeasible);
  LinearProgram unb{Matrix{{1.0, -1.0}}, {Sense::Le}, Vector{{1.0}}, Vector{{-1.0, 0.0}}, {true, true}};
  CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("feasibility-only programs return a feasible point") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 30; ++t) {
    const Matrix A = Matrix::Random(6, 4);
    const Vector x0 = (Vector::Random(4).array() + 1.0).matrix();
    const Vector slack = (Vector::Random(6).array().abs()).matrix();
    LinearProgram lp{A, std::vector<Sense>(6, Sense::Le), A * x0 + slack, Vector{}, std::vector<bool>(4, true)};
    const auto r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(((A * r.x - lp.rhs).array() <= 1e-9).all());
    CHECK(r.x.minCoeff() >= -1e-12);
  }
}

TEST_CASE("LP agrees with vertex enumeration in two dimensions") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    // Box [0, 2]^2 plus one random cut through (1, 1).
    const Vector a{{u(rng), u(rng)}};
    const Vector c{{u(rng), u(rng)}};
    LinearProgram lp{Matrix{{1.0, 0.0}, {0.0, 1.0}, {a[0], a[1]}}, {Sense::Le, Sense::Le, Sense::Le},
                     Vector{{2.0, 2.0, a.sum()}}, c, {true, true}};
    const auto r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    double best = 1e300;
    const int steps = 400;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= steps; ++j) {
        const Vector x{{2.0 * i / steps, 2.0 * j / steps}};
        if (a.dot(x) <= a.sum() + 1e-12) best = std::min(best, c.dot(x));
      }
    }
    CHECK(r.objective <= best + 1e-9);
    CHECK(r.objective >= best - 2.0 * 2.0 / steps * c.cwiseAbs().sum());
  }
}

TEST_CASE("degenerate program terminates") {
  // Several constraints active at the origin.
  LinearProgram lp{Matrix{{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {2.0, 1.0}},
                   {Sense::Le, Sense::Le, Sense::Le, Sense::Le},
                   Vector{{0.0, 0.0, 0.0, 3.0}},
                   Vector{{-1.0, -1.0}},
                   {true, true}};
  const auto r = solve_lp(lp);
  CHECK(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(0.0));
}

TEST_CASE("malformed programs are rejected") {
  LinearProgram lp{Matrix::Zero(2, 2), {Sense::Le}, Vector::Zero(2), Vector{}, {true, true}};
  CHECK_THROWS(lp.validate());
  CHECK(to_string(LpStatus::Infeasible) == "infeasible");
}
