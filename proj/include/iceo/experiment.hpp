#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "iceo/config.hpp"
#include "iceo/results.hpp"

namespace iceo {

/// Runs body(0..count-1) on at most `jobs` worker threads.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

/// Fits the configured surrogate for (problem, rho).
std::unique_ptr<Surrogate> build_surrogate(const ExperimentConfig& cfg, const ProblemInstance& problem);

/// Seeds of one (n, sim) cell. Test data depends only on test_seed and sim.
struct CellSeeds {
  std::uint64_t dgp = 0;
  std::uint64_t train = 0;
  std::uint64_t test = 0;
  std::uint64_t init = 0;
  std::uint64_t shuffle = 0;
};
CellSeeds cell_seeds(const ExperimentConfig& cfg, int n, int sim);

/// Mean unregularized test cost; throws if a decision leaves S.
double evaluate_policy(const Dataset& test, const Policy& policy, const ProblemInstance& problem);

struct CellContext {
  const ExperimentConfig* cfg = nullptr;
  const ProblemInstance* problem = nullptr;
  const Surrogate* surrogate = nullptr;
};

/// One record per configured method. A module error fails every record of the cell.
std::vector<ResultRecord> run_cell(const CellContext& ctx, const std::vector<std::string>& methods, int n, int sim,
                                   int degree);

struct RunOutcome {
  std::vector<ResultRecord> records;  // sorted
  int failed_cells = 0;
  std::string results_path;
};

/// Sweeps sample_sizes x num_simulations; writes results.csv, timings.csv and
/// config.json into `out_dir` when it is not empty.
RunOutcome run_experiment(const ExperimentConfig& cfg, int jobs, const std::string& out_dir);

/// Sweeps misspec.degrees x num_simulations at misspec.sample_size with iceo and pto.
RunOutcome run_misspec_study(const ExperimentConfig& cfg, int jobs, const std::string& out_dir);

}  // namespace iceo
