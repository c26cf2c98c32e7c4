#include "iceo/experiment.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include "iceo/benchmarks.hpp"
#include "iceo/datagen.hpp"
#include "iceo/format.hpp"

namespace iceo {

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  if (count <= 0) return;
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

std::unique_ptr<Surrogate> build_surrogate(const ExperimentConfig& cfg, const ProblemInstance& problem) {
  OracleConfig ocfg;
  ocfg.rho = cfg.rho;
  const SurrogateSpec& s = cfg.surrogate;
  if (s.kind == "bernstein") return std::make_unique<BernsteinModel>(bernstein_fit(problem, ocfg, s.order));
  const std::uint64_t seed = mix_seed(cfg.seed, 14);
  const auto samples =
      generate_surrogate_samples_mixed(problem, ocfg, s.samples, s.noise, seed, s.vertex_fraction, s.concentration);
  if (s.kind == "krr") return std::make_unique<KernelModel>(krr_fit(samples, s.degree, s.offset, s.ridge));
  MlpFitConfig mc = s.mlp;
  mc.seed = mix_seed(seed, 3);
  return std::make_unique<MlpSurrogate>(mlp_fit(samples, mc).model);
}

CellSeeds cell_seeds(const ExperimentConfig& cfg, int n, int sim) {
  CellSeeds s;
  s.dgp = mix_seed(mix_seed(cfg.seed, 11), static_cast<std::uint64_t>(sim));
  s.train = mix_seed(mix_seed(cfg.seed, 12), static_cast<std::uint64_t>(n) * 1000003ULL + static_cast<std::uint64_t>(sim));
  s.test = mix_seed(mix_seed(cfg.test_seed, 13), static_cast<std::uint64_t>(sim));
  s.init = mix_seed(s.train, 3);
  s.shuffle = mix_seed(s.train, 4);
  return s;
}

double evaluate_policy(const Dataset& test, const Policy& policy, const ProblemInstance& problem) {
  if (test.empty()) throw std::invalid_argument("evaluate_policy: empty test set");
  double total = 0.0;
  for (int i = 0; i < test.size(); ++i) {
    const Vector w = policy(test.x(i));
    if (!problem.region().contains(w, 1e-6)) throw std::runtime_error("deployed decision is infeasible");
    total += problem.cost(w, test.labels[static_cast<std::size_t>(i)]);
  }
  return total / test.size();
}

namespace {

std::string kv(const std::string& key, double v) { return key + "=" + format_double(v); }

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<ResultRecord> run_cell(const CellContext& ctx, const std::vector<std::string>& methods, int n, int sim,
                                   int degree) {
  const ExperimentConfig& cfg = *ctx.cfg;
  const ProblemInstance& problem = *ctx.problem;
  std::vector<ResultRecord> records;
  for (const auto& m : methods) {
    ResultRecord r;
    r.method = m;
    r.n = n;
    r.sim = sim;
    r.degree = degree;
    records.push_back(std::move(r));
  }
  try {
    const CellSeeds seeds = cell_seeds(cfg, n, sim);
    const DgpConfig dgp = make_dgp(cfg.dgp.feature_dim, cfg.dgp.feature_scale, problem.num_scenarios(), degree,
                                   seeds.dgp, cfg.dgp.max_entry);
    const Dataset full = generate_dataset(n, dgp, seeds.train, Split::Train);
    const auto [train, val] = split_train_validation(full, cfg.validation_fraction);
    const Dataset test = generate_dataset(cfg.test_size, dgp, seeds.test, Split::Test);
    OracleConfig ocfg;
    ocfg.rho = cfg.rho;
    const TrainConfig tcfg = cfg.training.train_config(cfg.rho, seeds.shuffle);

    for (auto& r : records) {
      const auto start = std::chrono::steady_clock::now();
      if (r.method == "iceo") {
        std::unique_ptr<Hypothesis> h0 = cfg.hypothesis.build(problem.num_scenarios(), dgp.feature_dim, seeds.init);
        if (cfg.training.iceo_init == "pto") {
          h0 = tune_pto(train, val, *h0, tcfg, cfg.training.learning_rates).result.hypothesis;
        }
        const TunedResult t = tune_iceo(train, val, *h0, *ctx.surrogate, problem, tcfg, cfg.training.learning_rates);
        r.test_cost = evaluate_policy(test, deployed_policy(*t.result.hypothesis, problem, ocfg), problem);
        r.hyperparameters =
            "init=" + cfg.training.iceo_init + ";" + kv("lr", t.lr) + ";" + kv("epoch", t.result.best_epoch);
      } else if (r.method == "pto") {
        const auto h0 = cfg.hypothesis.build(problem.num_scenarios(), dgp.feature_dim, seeds.init);
        const TunedResult t = tune_pto(train, val, *h0, tcfg, cfg.training.learning_rates);
        r.test_cost = evaluate_policy(test, deployed_policy(*t.result.hypothesis, problem, ocfg), problem);
        r.hyperparameters = kv("lr", t.lr) + ";" + kv("epoch", t.result.best_epoch);
      } else if (r.method == "saa") {
        const Vector w = saa_decision(full, problem, ocfg);
        r.test_cost = evaluate_policy(test, [&w](const Vector&) { return w; }, problem);
      } else if (r.method == "pres-knn") {
        const TunedChoice c = tune_knn(train, val, problem, ocfg, cfg.knn_grid);
        r.test_cost = evaluate_policy(test, knn_policy(train, static_cast<int>(c.parameter), problem, ocfg), problem);
        r.hyperparameters = kv("k", c.parameter);
      } else if (r.method == "pres-kernel") {
        const double median = median_pairwise_distance(train);
        std::vector<double> grid;
        for (double f : cfg.bandwidth_factors) grid.push_back(f * median);
        const TunedChoice c = tune_kernel(train, val, problem, ocfg, grid);
        r.test_cost = evaluate_policy(test, kernel_policy(train, c.parameter, problem, ocfg), problem);
        r.hyperparameters = kv("bandwidth", c.parameter);
      } else if (r.method == "oracle") {
        OracleConfig tight;
        tight.rho = cfg.oracle_rho;
        r.test_cost = evaluate_policy(
            test, [&](const Vector& x) { return regularized_solution(problem, conditional_probs(x, dgp), tight); },
            problem);
        r.hyperparameters = kv("rho", cfg.oracle_rho);
      } else {
        throw std::invalid_argument("unknown method " + r.method);
      }
      r.wall_seconds = elapsed(start);
    }
  } catch (const std::exception& e) {
    for (auto& r : records) {
      r.ok = false;
      r.test_cost = 0.0;
      r.hyperparameters.clear();
      r.message = e.what();
    }
  }
  return records;
}

namespace {

struct CellJob {
  int n;
  int sim;
  int degree;
};

RunOutcome run_cells(const ExperimentConfig& cfg, const std::vector<std::string>& methods,
                     const std::vector<CellJob>& jobs_list, int jobs, const std::string& out_dir) {
  const ProblemInstance problem = cfg.problem.build();
  const bool needs_surrogate = std::find(methods.begin(), methods.end(), "iceo") != methods.end();
  std::unique_ptr<Surrogate> surrogate = needs_surrogate ? build_surrogate(cfg, problem) : nullptr;
  CellContext ctx{&cfg, &problem, surrogate.get()};

  std::vector<std::vector<ResultRecord>> per_cell(jobs_list.size());
  parallel_for(static_cast<int>(jobs_list.size()), jobs, [&](int i) {
    const CellJob& j = jobs_list[static_cast<std::size_t>(i)];
    per_cell[static_cast<std::size_t>(i)] = run_cell(ctx, methods, j.n, j.sim, j.degree);
  });

  RunOutcome out;
  for (auto& cell : per_cell) {
    if (!cell.empty() && !cell.front().ok) ++out.failed_cells;
    for (auto& r : cell) out.records.push_back(std::move(r));
  }
  sort_records(out.records);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    out.results_path = (dir / "results.csv").string();
    write_results_csv(out.results_path, out.records);
    write_timings_csv((dir / "timings.csv").string(), out.records);
    if (std::find(methods.begin(), methods.end(), "iceo") != methods.end() &&
        std::find(methods.begin(), methods.end(), "pto") != methods.end()) {
      write_improvement_csv((dir / "improvement.csv").string(), out.records);
    }
    save_json(config_to_json(cfg), (dir / "config.json").string());
    if (surrogate) save_json(surrogate_to_json(*surrogate, cfg.rho, mix_seed(cfg.seed, 14)), (dir / "surrogate.json").string());
  }
  return out;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, int jobs, const std::string& out_dir) {
  cfg.validate();
  std::vector<CellJob> cells;
  for (int n : cfg.sample_sizes) {
    for (int sim = 0; sim < cfg.num_simulations; ++sim) cells.push_back({n, sim, cfg.dgp.degree});
  }
  return run_cells(cfg, cfg.methods, cells, jobs, out_dir);
}

RunOutcome run_misspec_study(const ExperimentConfig& cfg, int jobs, const std::string& out_dir) {
  cfg.validate();
  if (cfg.hypothesis.kind != "softmax-linear") {
    throw ConfigError("the misspecification study requires the softmax-linear hypothesis class");
  }
  std::vector<CellJob> cells;
  for (int deg : cfg.misspec.degrees) {
    for (int sim = 0; sim < cfg.num_simulations; ++sim) cells.push_back({cfg.misspec.sample_size, sim, deg});
  }
  return run_cells(cfg, {"iceo", "pto"}, cells, jobs, out_dir);
}

}  // namespace iceo
