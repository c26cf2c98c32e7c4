// Acceptance checks. One PASS/FAIL line per criterion, then a summary, on stdout
// and in acceptance_report.txt. Exit status is 0 whenever every check ran to completion.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "iceo/benchmarks.hpp"
#include "iceo/experiment.hpp"
#include "iceo/oracle.hpp"
#include "iceo/semialgebraic.hpp"
#include "test_support.hpp"

using namespace iceo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failed = 0;
std::ofstream g_report;

void emit(const std::string& line) {
  std::cout << line << std::endl;
  if (g_report) g_report << line << std::endl;
}

void report(int id, const std::string& name, const Outcome& o, double seconds) {
  if (!o.pass) ++g_failed;
  char buf[64];
  std::snprintf(buf, sizeof buf, " [%.1fs]", seconds);
  emit(std::string(o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(id) + " (" + name + "): " + o.detail +
       buf);
}

template <typename F>
void run(int id, const std::string& name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

fs::path work_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "iceo-acceptance" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Outcome oracle_correctness() {
  const auto nv = default_newsvendor();
  OracleConfig cfg;
  cfg.rho = 0.01;
  const auto ps = sample_simplex_uniform(4, 20, 101);
  double worst = 0.0;
  for (const auto& p : ps) {
    const Vector w = solve_regularized(nv, p, cfg).w;
    const Vector g = brute_force_solve(nv, p, cfg.rho, 0.25);
    worst = std::max(worst, (w - g).cwiseAbs().maxCoeff());
  }
  return {worst <= 0.25, fmt("max sup-norm gap %.4g over 20 points", worst)};
}

Outcome lipschitz() {
  const auto nv = default_newsvendor();
  const double L = estimate_cost_lipschitz(nv, 2000, 201);
  const auto a = sample_simplex_uniform(4, 200, 202);
  const auto b = sample_simplex_uniform(4, 200, 203);
  int violations = 0;
  double tightest = 0.0;
  for (double rho : {0.01, 0.1, 1.0}) {
    OracleConfig cfg;
    cfg.rho = rho;
    for (int i = 0; i < 200; ++i) {
      const double lhs = (regularized_solution(nv, a[i], cfg) - regularized_solution(nv, b[i], cfg)).norm();
      const double rhs = L / rho * (a[i].values() - b[i].values()).norm() + 1e-6;
      violations += lhs > rhs;
      tightest = std::max(tightest, lhs / rhs);
    }
  }
  return {violations == 0,
          std::to_string(violations) + " violations, L_c=" + fmt("%.4g", L) + fmt(", max ratio %.3g", tightest)};
}

double sup_error(const Surrogate& s, const ProblemInstance& problem, const OracleConfig& cfg,
                 const std::vector<ProbVector>& test) {
  double sup = 0.0;
  for (const auto& p : test) {
    sup = std::max(sup, (s.evaluate(p) - regularized_solution(problem, p, cfg)).cwiseAbs().maxCoeff());
  }
  return sup;
}

Outcome bernstein_trend() {
  const auto nv = default_newsvendor();
  OracleConfig cfg;
  cfg.rho = 0.01;
  const auto test = sample_simplex_uniform(4, 500, 301);
  const double e4 = sup_error(bernstein_fit(nv, cfg, 4), nv, cfg, test);
  const double e16 = sup_error(bernstein_fit(nv, cfg, 16), nv, cfg, test);
  return {e16 <= 0.75 * e4, fmt("err4=%.4g", e4) + fmt(" err16=%.4g", e16) + fmt(" ratio=%.3f", e16 / e4)};
}

double rmse(const Surrogate& s, const std::vector<SurrogateSample>& test) {
  double sq = 0.0;
  for (const auto& t : test) sq += (s.evaluate(t.p) - t.w).squaredNorm();
  return std::sqrt(sq / (static_cast<double>(test.size()) * s.dimension()));
}

Outcome krr_trend() {
  const auto nv = default_newsvendor();
  OracleConfig cfg;
  cfg.rho = 0.01;
  const ExperimentConfig defaults;
  double small = 0.0, large = 0.0;
  for (int seed = 0; seed < 5; ++seed) {
    const auto test = generate_surrogate_samples(nv, cfg, 1000, 0.0, mix_seed(400, seed));
    const auto s500 = generate_surrogate_samples(nv, cfg, 500, 0.25, mix_seed(401, seed));
    const auto s4000 = generate_surrogate_samples(nv, cfg, 4000, 0.25, mix_seed(402, seed));
    small += rmse(krr_fit(s500, 3, defaults.surrogate.offset, defaults.surrogate.ridge), test) / 5.0;
    large += rmse(krr_fit(s4000, 3, defaults.surrogate.offset, defaults.surrogate.ridge), test) / 5.0;
  }
  return {large <= 0.9 * small,
          fmt("rmse500=%.4g", small) + fmt(" rmse4000=%.4g", large) + fmt(" ratio=%.3f", large / small)};
}

Outcome gradient_fidelity() {
  const double tol = 1e-4;
  const int points = 50;
  std::map<std::string, std::pair<int, double>> stats;  // failures, worst error
  auto record = [&](const std::string& what, double err) {
    auto& s = stats[what];
    s.first += !(err < tol);
    s.second = std::max(s.second, err);
  };

  const auto nv = default_newsvendor();
  OracleConfig ocfg;
  ocfg.rho = 0.01;
  std::mt19937_64 rng(501);

  const BernsteinModel bern = bernstein_fit(nv, ocfg, 6);
  const KernelModel krr = krr_fit(generate_surrogate_samples(nv, ocfg, 300, 0.25, 502), 3, 1.0, 1e-6);
  MlpFitConfig mc;
  mc.hidden = 16;
  mc.epochs = 30;
  mc.seed = 503;
  const MlpSurrogate mlp = mlp_fit(generate_surrogate_samples(nv, ocfg, 500, 0.0, 504), mc).model;
  for (const Surrogate* s : {static_cast<const Surrogate*>(&bern), static_cast<const Surrogate*>(&krr),
                             static_cast<const Surrogate*>(&mlp)}) {
    for (int t = 0; t < points; ++t) {
      const Vector p = testing::interior_point(4, rng);
      const Matrix fd = testing::central_jacobian([&](const Vector& q) { return s->evaluate_at(q); }, p, 1e-6);
      record("jacobian-" + s->kind(), testing::rel_err(s->evaluate_with_jacobian_at(p).jacobian, fd));
    }
  }

  std::uniform_int_distribution<int> label(0, 3);
  for (int t = 0; t < points; ++t) {
    const Vector x = testing::gaussian_vector(3, rng);
    const int k = label(rng);
    const auto lin = SoftmaxLinearHypothesis::random(4, 3, 600 + t, 0.5);
    const auto net = SoftmaxMlpHypothesis::random(4, 3, 8, 700 + t, 0.5);
    for (const Hypothesis* h : {static_cast<const Hypothesis*>(&lin), static_cast<const Hypothesis*>(&net)}) {
      auto probs = [&](const Vector& theta) {
        auto c = h->clone();
        c->set_params(theta);
        return c->forward(x).values();
      };
      record("param-jacobian-" + h->kind(),
             testing::rel_err(h->param_jacobian(x), testing::central_jacobian(probs, h->params(), 1e-6)));
      auto ce = [&](const Vector& theta) {
        auto c = h->clone();
        c->set_params(theta);
        return cross_entropy_loss(c->forward(x), k).value;
      };
      record("cross-entropy-" + h->kind(), testing::rel_err(cross_entropy_with_gradient(*h, x, k).gradient,
                                                            testing::central_gradient(ce, h->params(), 1e-6)));
    }
  }

  // ICEO gradient on the newsvendor through the kernel surrogate, at parameter
  // draws whose surrogate decisions stay away from the cost kinks.
  const Dataset data = generate_dataset(20, make_dgp(3, 5.0, 4, 1, 505), 506);
  int accepted = 0, drawn = 0;
  while (accepted < points && drawn < 20 * points) {
    const auto h = SoftmaxLinearHypothesis::random(4, 3, 800 + drawn++, 0.2);
    double margin = 1e300;
    for (int i = 0; i < data.size(); ++i) {
      const Vector w = krr.evaluate(h.forward(data.x(i)));
      const Vector& z = nv.scenarios()[data.labels[static_cast<std::size_t>(i)]];
      margin = std::min(margin, (w - z).cwiseAbs().minCoeff());
    }
    if (margin < 1e-3) continue;
    ++accepted;
    auto f = [&](const Vector& theta) {
      auto c = h.clone();
      c->set_params(theta);
      return iceo_objective(data, *c, krr, nv, ocfg.rho);
    };
    record("iceo-gradient", testing::rel_err(iceo_gradient(data, h, krr, nv, ocfg.rho),
                                             testing::central_gradient(f, h.params(), 1e-6)));
  }
  if (accepted < points) stats["iceo-gradient"].first += points - accepted;

  bool ok = true;
  std::string detail;
  for (const auto& [what, s] : stats) {
    ok &= s.first == 0;
    detail += (detail.empty() ? "" : ", ") + what + fmt(" worst=%.2g", s.second);
  }
  return {ok, detail};
}

double mean_cost(const std::vector<ResultRecord>& rs, const std::string& method, int n, int degree = 1) {
  std::vector<double> v;
  for (const auto& r : rs) {
    if (r.ok && r.method == method && r.n == n && r.degree == degree) v.push_back(r.test_cost);
  }
  if (v.empty()) throw std::runtime_error("no successful " + method + " records at n=" + std::to_string(n));
  return summarize(v).mean;
}

Outcome benchmark_trend(const RunOutcome& bench) {
  const auto& rs = bench.records;
  bool ok = bench.failed_cells == 0;
  std::string detail = "failed cells " + std::to_string(bench.failed_cells);
  for (int n : {300, 500, 700}) {
    const double iceo = mean_cost(rs, "iceo", n), saa = mean_cost(rs, "saa", n);
    ok &= iceo <= saa;
    detail += "; n=" + std::to_string(n) + fmt(" iceo=%.4g", iceo) + fmt(" saa=%.4g", saa);
  }
  const double best = std::min({mean_cost(rs, "pres-knn", 700), mean_cost(rs, "pres-kernel", 700),
                                mean_cost(rs, "pto", 700)});
  const double iceo = mean_cost(rs, "iceo", 700);
  ok &= iceo <= 1.05 * best;
  detail += fmt("; best other at 700=%.4g", best);
  return {ok, detail};
}

Outcome consistency_trend(const RunOutcome& bench) {
  const auto& rs = bench.records;
  const double jstar = mean_cost(rs, "oracle", 700);
  const double gap100 = mean_cost(rs, "iceo", 100) - jstar;
  const double gap700 = mean_cost(rs, "iceo", 700) - jstar;
  return {gap700 < gap100, fmt("J*=%.4g", jstar) + fmt(" gap100=%.4g", gap100) + fmt(" gap700=%.4g", gap700)};
}

Outcome misspec_trend() {
  const ExperimentConfig cfg;
  const RunOutcome out = run_misspec_study(cfg, jobs(), work_dir("misspec").string());
  std::map<int, double> by_degree;
  for (const auto& row : improvement_table(out.records)) by_degree[row.degree] = row.improvement.mean;
  bool ok = out.failed_cells == 0;
  std::string detail = "failed cells " + std::to_string(out.failed_cells);
  for (int d : {1, 2, 3, 4}) {
    if (!by_degree.count(d)) {
      ok &= d == 1;
      continue;
    }
    if (d >= 2) ok &= by_degree[d] > 0.0;
    detail += "; deg" + std::to_string(d) + fmt(" improvement=%.4g", by_degree[d]);
  }
  ok &= by_degree.count(2) && by_degree.count(4) && by_degree[4] >= by_degree[2];
  return {ok, detail};
}

Outcome reformulation_soundness() {
  const int K = 4, p = 3;
  const auto domain = PolyhedralDomain::box(p, -1.0, 1.0);
  const auto sys = build_membership_system(domain, K);
  std::mt19937_64 rng(901);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> shrink(0.3, 1.0);
  int certified_failures = 0, violator_failures = 0;
  for (int i = 0; i < 60; ++i) {
    Vector b = Vector::NullaryExpr(K, [&] { return 0.2 + std::abs(u(rng)); });
    b /= b.sum();
    Matrix B = Matrix::NullaryExpr(K, p, [&] { return u(rng); });
    B.rowwise() -= B.colwise().mean();
    const Vector reach = B.cwiseAbs().rowwise().sum();
    B *= (b.array() / reach.array()).minCoeff();
    if (i < 50) {
      B *= shrink(rng);
      const bool certified = check_feasibility(sys, B, b).status == Certification::Certified;
      const auto hit = falsify_by_sampling(domain, B, b, 10000, mix_seed(902, i), 1e-9);
      certified_failures += !certified || hit.has_value();
    } else {
      B *= 3.0;
      violator_failures += check_feasibility(sys, B, b).status != Certification::Infeasible;
    }
  }
  return {certified_failures == 0 && violator_failures == 0,
          std::to_string(50 - certified_failures) + "/50 certified without violations, " +
              std::to_string(10 - violator_failures) + "/10 violators infeasible"};
}

Outcome determinism() {
  ExperimentConfig cfg;
  cfg.sample_sizes = {100};
  cfg.num_simulations = 2;
  cfg.test_size = 200;
  cfg.surrogate.kind = "bernstein";
  cfg.surrogate.order = 6;
  cfg.training.epochs = 40;
  const fs::path a = work_dir("det-a"), b = work_dir("det-b"), c = work_dir("det-c");
  run_experiment(cfg, 1, a.string());
  run_experiment(cfg, 1, b.string());
  run_experiment(cfg, jobs() + 1, c.string());
  bool ok = true;
  for (const char* f : {"results.csv", "improvement.csv", "config.json", "surrogate.json"}) {
    const std::string ra = testing::read_file(a / f);
    ok &= !ra.empty() && ra == testing::read_file(b / f) && ra == testing::read_file(c / f);
  }
  return {ok, "results, improvement, config and surrogate files compared across three runs"};
}

}  // namespace

int main() {
  g_report.open("acceptance_report.txt");
  try {
    run(1, "oracle agrees with grid search", oracle_correctness);
    run(2, "oracle Lipschitz bound", lipschitz);
    run(3, "Bernstein error trend", bernstein_trend);
    run(4, "kernel ridge error trend", krr_trend);
    run(5, "gradient fidelity", gradient_fidelity);

    std::optional<RunOutcome> bench;
    const auto start = std::chrono::steady_clock::now();
    try {
      ExperimentConfig cfg;
      cfg.methods.push_back("oracle");
      bench = run_experiment(cfg, jobs(), work_dir("bench").string());
    } catch (const std::exception& e) {
      emit(std::string("benchmark run failed: ") + e.what());
    }
    const double bench_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(fmt("benchmark sweep finished in %.1fs", bench_seconds));
    run(6, "benchmark trend", [&] {
      if (!bench) return Outcome{false, "no benchmark results"};
      return benchmark_trend(*bench);
    });
    run(7, "misspecification trend", misspec_trend);
    run(8, "consistency trend", [&] {
      if (!bench) return Outcome{false, "no benchmark results"};
      return consistency_trend(*bench);
    });
    run(9, "reformulation soundness", reformulation_soundness);
    run(10, "determinism", determinism);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
    return 1;
  }
  emit("SUMMARY: " + std::to_string(10 - g_failed) + "/10 criteria passed");
  return 0;
}
