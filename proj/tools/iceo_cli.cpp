#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "iceo/benchmarks.hpp"
#include "iceo/config.hpp"
#include "iceo/datagen.hpp"
#include "iceo/experiment.hpp"
#include "iceo/format.hpp"
#include "iceo/json_io.hpp"
#include "iceo/results.hpp"
#include "iceo/semialgebraic.hpp"
#include "iceo/training.hpp"

namespace fs = std::filesystem;
using namespace iceo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
};

std::string default_output_root() {
  if (const char* env = std::getenv("ICEO_OUTPUT_ROOT"); env && *env) return env;
  return "iceo-out";
}

ExperimentConfig resolve_config(const CommonOptions& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  return cfg;
}

std::string resolve_out(const CommonOptions& o, const ExperimentConfig& cfg, const std::string& command) {
  if (!o.out.empty()) return o.out;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return (fs::path(default_output_root()) / command).string();
}

std::ofstream open_csv(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

int report_run(const RunOutcome& r) {
  std::cout << "records: " << r.records.size() << "\nfailed cells: " << r.failed_cells << "\nresults: " << r.results_path
            << '\n';
  for (const auto& row : cost_table(r.records)) {
    std::cout << "  " << row.method << " deg=" << row.degree << " n=" << row.n << " mean=" << row.cost.mean;
    if (row.cost.std_error) std::cout << " se=" << *row.cost.std_error;
    std::cout << '\n';
  }
  return r.failed_cells > 0 ? kExitPartial : kExitOk;
}

int cmd_oracle_check(const CommonOptions& o, int num_points, double step) {
  const ExperimentConfig cfg = resolve_config(o);
  const ProblemInstance problem = cfg.problem.build();
  const fs::path dir = resolve_out(o, cfg, "oracle-check");
  OracleConfig ocfg;
  ocfg.rho = cfg.rho;
  const auto points = sample_simplex_uniform(problem.num_scenarios(), num_points, mix_seed(cfg.seed, 21));
  auto out = open_csv(dir / "oracle_check.csv");
  out << "index,max_abs_diff,within_step\n";
  int bad = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector w = regularized_solution(problem, points[i], ocfg);
    const Vector g = brute_force_solve(problem, points[i], cfg.rho, step);
    const double diff = (w - g).cwiseAbs().maxCoeff();
    const bool ok = diff <= step;
    bad += ok ? 0 : 1;
    out << i << ',' << format_double(diff) << ',' << (ok ? 1 : 0) << '\n';
  }
  std::cout << "oracle-check: " << (points.size() - static_cast<std::size_t>(bad)) << "/" << points.size()
            << " points within " << step << " of the grid search\n";
  return bad == 0 ? kExitOk : kExitPartial;
}

int cmd_approx_error(const CommonOptions& o, int test_points) {
  const ExperimentConfig cfg = resolve_config(o);
  const ProblemInstance problem = cfg.problem.build();
  const fs::path dir = resolve_out(o, cfg, "approx-error");
  OracleConfig ocfg;
  ocfg.rho = cfg.rho;
  const auto test = generate_surrogate_samples(problem, ocfg, test_points, 0.0, mix_seed(cfg.seed, 31));
  auto out = open_csv(dir / "approx_error.csv");
  out << "surrogate,setting,sup_error,rmse,mape\n";
  auto row = [&](const std::string& name, const std::string& setting, const Surrogate& s) {
    double sup = 0.0, sq = 0.0;
    for (const auto& t : test) {
      const Vector e = s.evaluate(t.p) - t.w;
      sup = std::max(sup, e.cwiseAbs().maxCoeff());
      sq += e.squaredNorm();
    }
    const double rmse = std::sqrt(sq / (static_cast<double>(test.size()) * s.dimension()));
    const double mp = mape(s, test);
    out << name << ',' << setting << ',' << format_double(sup) << ',' << format_double(rmse) << ','
        << format_double(mp) << '\n';
    std::cout << name << " " << setting << ": sup=" << sup << " rmse=" << rmse << " mape=" << mp << '\n';
  };
  for (int s : {2, 4, 8, 16}) row("bernstein", "order=" + std::to_string(s), bernstein_fit(problem, ocfg, s));
  for (int m : {500, 1000, 2000, 4000}) {
    const auto samples = generate_surrogate_samples(problem, ocfg, m, 0.25, mix_seed(cfg.seed, 32));
    row("krr", "m=" + std::to_string(m), krr_fit(samples, cfg.surrogate.degree, cfg.surrogate.offset, cfg.surrogate.ridge));
  }
  const auto samples =
      generate_surrogate_samples_mixed(problem, ocfg, cfg.surrogate.samples, cfg.surrogate.noise,
                                       mix_seed(cfg.seed, 14), cfg.surrogate.vertex_fraction,
                                       cfg.surrogate.concentration);
  MlpFitConfig mc = cfg.surrogate.mlp;
  mc.seed = mix_seed(mix_seed(cfg.seed, 14), 3);
  row("mlp", "m=" + std::to_string(cfg.surrogate.samples), mlp_fit(samples, mc).model);
  return kExitOk;
}

int cmd_train(const CommonOptions& o, int n, int sim) {
  const ExperimentConfig cfg = resolve_config(o);
  const ProblemInstance problem = cfg.problem.build();
  const fs::path dir = resolve_out(o, cfg, "train");
  fs::create_directories(dir);
  const CellSeeds seeds = cell_seeds(cfg, n, sim);
  const DgpConfig dgp = make_dgp(cfg.dgp.feature_dim, cfg.dgp.feature_scale, problem.num_scenarios(), cfg.dgp.degree,
                                 seeds.dgp, cfg.dgp.max_entry);
  const Dataset full = generate_dataset(n, dgp, seeds.train);
  const auto [train, val] = split_train_validation(full, cfg.validation_fraction);
  const Dataset test = generate_dataset(cfg.test_size, dgp, seeds.test, Split::Test);
  const auto surrogate = build_surrogate(cfg, problem);
  std::unique_ptr<Hypothesis> h0 = cfg.hypothesis.build(problem.num_scenarios(), dgp.feature_dim, seeds.init);
  const TrainConfig tcfg = cfg.training.train_config(cfg.rho, seeds.shuffle);
  if (cfg.training.iceo_init == "pto") h0 = tune_pto(train, val, *h0, tcfg, cfg.training.learning_rates).result.hypothesis;
  const TunedResult t = tune_iceo(train, val, *h0, *surrogate, problem, tcfg, cfg.training.learning_rates);
  OracleConfig ocfg;
  ocfg.rho = cfg.rho;
  const double cost = evaluate_policy(test, deployed_policy(*t.result.hypothesis, problem, ocfg), problem);

  write_dataset_csv(full, (dir / "train.csv").string());
  write_dataset_csv(test, (dir / "test.csv").string());
  save_json(t.result.hypothesis->to_json(), (dir / "hypothesis.json").string());
  save_json(surrogate_to_json(*surrogate, cfg.rho, mix_seed(cfg.seed, 14)), (dir / "surrogate.json").string());
  auto trace = open_csv(dir / "loss_trace.csv");
  trace << "epoch,train_objective\n";
  for (std::size_t e = 0; e < t.result.loss_trace.size(); ++e) {
    trace << (e + 1) << ',' << format_double(t.result.loss_trace[e]) << '\n';
  }
  std::cout << "train: lr=" << t.lr << " best_epoch=" << t.result.best_epoch
            << " validation_cost=" << t.result.best_validation << " test_cost=" << cost << "\n";
  return kExitOk;
}

int cmd_semialg(const CommonOptions& o, int instances, int violators, int samples) {
  const ExperimentConfig cfg = resolve_config(o);
  const fs::path dir = resolve_out(o, cfg, "semialg-verify");
  const int K = cfg.problem.build().num_scenarios();
  const int p = cfg.dgp.feature_dim;
  const PolyhedralDomain domain = PolyhedralDomain::box(p, -1.0, 1.0);
  const SimplexMembershipSystem sys = build_membership_system(domain, K);
  Rng rng(mix_seed(cfg.seed, 41));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto out = open_csv(dir / "semialg.csv");
  out << "instance,kind,certification,violation_found\n";
  int failures = 0;
  for (int i = 0; i < instances + violators; ++i) {
    // b strictly inside the simplex, B with zero column sums, scaled to be tight on the box.
    Vector b = Vector::NullaryExpr(K, [&] { return 0.2 + std::abs(unif(rng)); });
    b /= b.sum();
    Matrix B = Matrix::NullaryExpr(K, p, [&] { return unif(rng); });
    B.rowwise() -= B.colwise().mean();
    const Vector reach = B.cwiseAbs().rowwise().sum();
    B *= (b.array() / reach.array()).minCoeff();
    const bool violator = i >= instances;
    if (violator) B *= 10.0;
    const FeasibilityResult fr = check_feasibility(sys, B, b);
    const auto hit = falsify_by_sampling(domain, B, b, samples, mix_seed(cfg.seed, 100 + i));
    const bool ok = violator ? fr.status == Certification::Infeasible
                             : fr.status == Certification::Certified && !hit.has_value();
    failures += ok ? 0 : 1;
    out << i << ',' << (violator ? "violator" : "certified") << ',' << to_string(fr.status) << ','
        << (hit ? 1 : 0) << '\n';
  }
  // A small polynomial program for external solvers.
  {
    const ProblemInstance problem = cfg.problem.build();
    OracleConfig ocfg;
    ocfg.rho = cfg.rho;
    const auto samples_krr = generate_surrogate_samples(problem, ocfg, 40, 0.0, mix_seed(cfg.seed, 42));
    const KernelModel krr = krr_fit(samples_krr, 2, cfg.surrogate.offset, 1e-3);
    const DgpConfig dgp = make_dgp(p, cfg.dgp.feature_scale, K, 1, mix_seed(cfg.seed, 43), cfg.dgp.max_entry);
    Dataset data = generate_dataset(5, dgp, mix_seed(cfg.seed, 44));
    data.features = data.features.cwiseMax(-1.0).cwiseMin(1.0);
    std::ofstream prog(dir / "program.txt", std::ios::binary);
    prog << export_polynomial_program(problem, krr, data, cfg.rho, domain);
  }
  std::cout << "semialg-verify: " << (instances + violators - failures) << "/" << (instances + violators)
            << " instances behaved as expected\n";
  return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_plot_data(const CommonOptions& o, std::string results_path) {
  ExperimentConfig cfg = resolve_config(o);
  const fs::path dir = resolve_out(o, cfg, "plot-data");
  if (results_path.empty()) results_path = (fs::path(default_output_root()) / "bench" / "results.csv").string();
  const PlotDataReport r = emit_plot_data(results_path, dir.string());
  for (const auto& f : r.files) std::cout << "wrote " << f << '\n';
  if (r.malformed > 0) std::cout << "skipped " << r.malformed << " malformed records\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrated conditional estimation-optimization experiments"};
  app.require_subcommand(1);
  CommonOptions opts;
  auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "Base seed (overrides the config)");
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--jobs", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  int oracle_points = 20;
  double oracle_step = 0.25;
  auto* oracle = app.add_subcommand("oracle-check", "Compare the oracle with a grid search");
  add_common(oracle);
  oracle->add_option("--points", oracle_points, "Number of random simplex points");
  oracle->add_option("--step", oracle_step, "Grid step");

  int approx_points = 500;
  auto* approx = app.add_subcommand("approx-error", "Surrogate approximation errors");
  add_common(approx);
  approx->add_option("--test-points", approx_points, "Held-out simplex points");

  int train_n = 700, train_sim = 0;
  auto* train = app.add_subcommand("train", "Train one ICEO model and write its artifacts");
  add_common(train);
  train->add_option("--n", train_n, "Training set size");
  train->add_option("--sim", train_sim, "Simulation index");

  auto* bench = app.add_subcommand("bench", "Benchmark sweep over sample sizes and simulations");
  add_common(bench);
  auto* misspec = app.add_subcommand("misspec", "Misspecification study over data-generating degrees");
  add_common(misspec);

  int semi_instances = 50, semi_violators = 10, semi_samples = 10000;
  auto* semi = app.add_subcommand("semialg-verify", "Check the simplex-membership reformulation");
  add_common(semi);
  semi->add_option("--instances", semi_instances, "Certified instances");
  semi->add_option("--violators", semi_violators, "Constructed violators");
  semi->add_option("--samples", semi_samples, "Hit-and-run samples per instance");

  std::string results_path;
  auto* plot = app.add_subcommand("plot-data", "Tidy per-figure CSVs from a results file");
  add_common(plot);
  plot->add_option("--results", results_path, "results.csv to summarize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (oracle->parsed()) return cmd_oracle_check(opts, oracle_points, oracle_step);
    if (approx->parsed()) return cmd_approx_error(opts, approx_points);
    if (train->parsed()) return cmd_train(opts, train_n, train_sim);
    if (bench->parsed()) {
      const ExperimentConfig cfg = resolve_config(opts);
      return report_run(run_experiment(cfg, opts.jobs, resolve_out(opts, cfg, "bench")));
    }
    if (misspec->parsed()) {
      const ExperimentConfig cfg = resolve_config(opts);
      const RunOutcome r = run_misspec_study(cfg, opts.jobs, resolve_out(opts, cfg, "misspec"));
      for (const auto& row : improvement_table(r.records)) {
        std::cout << "  improvement deg=" << row.degree << " mean=" << row.improvement.mean << '\n';
      }
      return report_run(r);
    }
    if (semi->parsed()) return cmd_semialg(opts, semi_instances, semi_violators, semi_samples);
    if (plot->parsed()) return cmd_plot_data(opts, results_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
