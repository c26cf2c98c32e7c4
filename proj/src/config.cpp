#include "iceo/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "iceo/json_io.hpp"

namespace iceo {

ProblemInstance ProblemSpec::build() const {
  std::vector<Vector> rows;
  for (const auto& s : scenarios) rows.push_back(Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size())));
  if (kind == "newsvendor") {
    return ProblemInstance::newsvendor(ScenarioSet(rows),
                                       Eigen::Map<const Vector>(holding.data(), static_cast<Eigen::Index>(holding.size())),
                                       Eigen::Map<const Vector>(stockout.data(), static_cast<Eigen::Index>(stockout.size())),
                                       capacity);
  }
  if (kind == "portfolio") return ProblemInstance::portfolio(ScenarioSet(rows), alpha);
  if (kind == "flow") {
    return triangle_flow(rows, flow_lower, flow_upper,
                         Eigen::Map<const Vector>(flow_target.data(), static_cast<Eigen::Index>(flow_target.size())));
  }
  throw ConfigError("unknown problem kind: " + kind);
}

std::unique_ptr<Hypothesis> HypothesisSpec::build(int num_scenarios, int feature_dim, std::uint64_t seed) const {
  if (kind == "softmax-linear") {
    return std::make_unique<SoftmaxLinearHypothesis>(
        SoftmaxLinearHypothesis::random(num_scenarios, feature_dim, seed, init_scale));
  }
  if (kind == "softmax-mlp") {
    return std::make_unique<SoftmaxMlpHypothesis>(
        SoftmaxMlpHypothesis::random(num_scenarios, feature_dim, hidden, seed, init_scale));
  }
  throw ConfigError("unknown hypothesis kind: " + kind);
}

TrainConfig TrainingSpec::train_config(double rho, std::uint64_t seed) const {
  TrainConfig c;
  c.rho = rho;
  c.adam = AdamConfig{learning_rates.empty() ? 1e-2 : learning_rates.back(), beta1, beta2, eps};
  c.epochs = epochs;
  c.batch_size = batch_size;
  c.patience = patience;
  c.eval_every = eval_every;
  c.seed = seed;
  return c;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  try {
    problem.build();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("problem: ") + e.what());
  }
  if (dgp.feature_dim < 1) fail("dgp.feature_dim must be >= 1");
  if (!(dgp.feature_scale > 0.0)) fail("dgp.feature_scale must be > 0");
  if (dgp.degree < 1) fail("dgp.degree must be >= 1");
  if (dgp.max_entry < 0) fail("dgp.max_entry must be >= 0");
  if (methods.empty()) fail("methods must not be empty");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end()) fail("unknown method: " + m);
    if (!seen.insert(m).second) fail("duplicate method: " + m);
  }
  if (sample_sizes.empty()) fail("sample_sizes must not be empty");
  for (int n : sample_sizes) {
    if (n < 10) fail("sample sizes must be >= 10");
  }
  if (num_simulations < 1) fail("num_simulations must be >= 1");
  if (test_size < 1) fail("test_size must be >= 1");
  if (!(rho > 0.0)) fail("rho must be > 0");
  if (!(oracle_rho > 0.0)) fail("oracle_rho must be > 0");
  if (!(validation_fraction > 0.0 && validation_fraction < 0.5)) fail("validation_fraction must lie in (0, 0.5)");
  if (hypothesis.kind != "softmax-linear" && hypothesis.kind != "softmax-mlp") fail("unknown hypothesis kind");
  if (hypothesis.hidden < 1) fail("hypothesis.hidden must be >= 1");
  if (surrogate.kind != "mlp" && surrogate.kind != "bernstein" && surrogate.kind != "krr") {
    fail("unknown surrogate kind: " + surrogate.kind);
  }
  if (surrogate.samples < 1) fail("surrogate.samples must be >= 1");
  if (surrogate.noise < 0.0) fail("surrogate.noise must be >= 0");
  if (!(surrogate.vertex_fraction >= 0.0 && surrogate.vertex_fraction <= 1.0)) {
    fail("surrogate.vertex_fraction must lie in [0, 1]");
  }
  if (!(surrogate.concentration > 0.0)) fail("surrogate.concentration must be > 0");
  if (surrogate.order < 1 || surrogate.degree < 1) fail("surrogate order/degree must be >= 1");
  if (training.epochs < 0 || training.patience < 1 || training.eval_every < 1) fail("bad training schedule");
  if (training.iceo_init != "pto" && training.iceo_init != "random") fail("training.iceo_init must be pto or random");
  if (training.learning_rates.empty()) fail("training.learning_rates must not be empty");
  for (double lr : training.learning_rates) {
    if (!(lr > 0.0)) fail("learning rates must be > 0");
  }
  if (knn_grid.empty() || bandwidth_factors.empty()) fail("tuning grids must not be empty");
  for (int k : knn_grid) {
    if (k < 1) fail("knn_grid entries must be >= 1");
  }
  for (double h : bandwidth_factors) {
    if (!(h > 0.0)) fail("bandwidth factors must be > 0");
  }
  if (misspec.degrees.empty()) fail("misspec.degrees must not be empty");
  for (int d : misspec.degrees) {
    if (d < 1) fail("misspec degrees must be >= 1");
  }
  if (misspec.sample_size < 10) fail("misspec.sample_size must be >= 10");
}

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    reject_unknown(j,
                   {"problem", "dgp", "methods", "sample_sizes", "num_simulations", "test_size", "rho", "oracle_rho",
                    "validation_fraction", "hypothesis", "surrogate", "training", "tuning", "misspec", "seed",
                    "test_seed", "output_dir"},
                   "config");
    if (j.contains("problem")) {
      const auto& p = j.at("problem");
      reject_unknown(p, {"kind", "scenarios", "holding", "stockout", "capacity", "alpha", "flow_lower", "flow_upper",
                         "flow_target"},
                     "problem");
      read(p, "kind", c.problem.kind);
      read(p, "scenarios", c.problem.scenarios);
      read(p, "holding", c.problem.holding);
      read(p, "stockout", c.problem.stockout);
      read(p, "capacity", c.problem.capacity);
      read(p, "alpha", c.problem.alpha);
      read(p, "flow_lower", c.problem.flow_lower);
      read(p, "flow_upper", c.problem.flow_upper);
      read(p, "flow_target", c.problem.flow_target);
    }
    if (j.contains("dgp")) {
      const auto& d = j.at("dgp");
      reject_unknown(d, {"feature_dim", "feature_scale", "max_entry", "degree"}, "dgp");
      read(d, "feature_dim", c.dgp.feature_dim);
      read(d, "feature_scale", c.dgp.feature_scale);
      read(d, "max_entry", c.dgp.max_entry);
      read(d, "degree", c.dgp.degree);
    }
    read(j, "methods", c.methods);
    read(j, "sample_sizes", c.sample_sizes);
    read(j, "num_simulations", c.num_simulations);
    read(j, "test_size", c.test_size);
    read(j, "rho", c.rho);
    read(j, "oracle_rho", c.oracle_rho);
    read(j, "validation_fraction", c.validation_fraction);
    if (j.contains("hypothesis")) {
      const auto& h = j.at("hypothesis");
      reject_unknown(h, {"kind", "hidden", "init_scale"}, "hypothesis");
      read(h, "kind", c.hypothesis.kind);
      read(h, "hidden", c.hypothesis.hidden);
      read(h, "init_scale", c.hypothesis.init_scale);
    }
    if (j.contains("surrogate")) {
      const auto& s = j.at("surrogate");
      reject_unknown(s, {"kind", "samples", "noise", "vertex_fraction", "concentration", "hidden", "epochs", "lr", "batch_size", "mape_floor", "order",
                         "degree", "offset", "ridge"},
                     "surrogate");
      read(s, "kind", c.surrogate.kind);
      read(s, "samples", c.surrogate.samples);
      read(s, "noise", c.surrogate.noise);
      read(s, "vertex_fraction", c.surrogate.vertex_fraction);
      read(s, "concentration", c.surrogate.concentration);
      read(s, "hidden", c.surrogate.mlp.hidden);
      read(s, "epochs", c.surrogate.mlp.epochs);
      read(s, "lr", c.surrogate.mlp.lr);
      read(s, "batch_size", c.surrogate.mlp.batch_size);
      read(s, "mape_floor", c.surrogate.mlp.mape_floor);
      read(s, "order", c.surrogate.order);
      read(s, "degree", c.surrogate.degree);
      read(s, "offset", c.surrogate.offset);
      read(s, "ridge", c.surrogate.ridge);
    }
    if (j.contains("training")) {
      const auto& t = j.at("training");
      reject_unknown(t, {"epochs", "batch_size", "patience", "eval_every", "beta1", "beta2", "eps", "learning_rates", "iceo_init"},
                     "training");
      read(t, "epochs", c.training.epochs);
      read(t, "batch_size", c.training.batch_size);
      read(t, "patience", c.training.patience);
      read(t, "eval_every", c.training.eval_every);
      read(t, "beta1", c.training.beta1);
      read(t, "beta2", c.training.beta2);
      read(t, "eps", c.training.eps);
      read(t, "learning_rates", c.training.learning_rates);
      read(t, "iceo_init", c.training.iceo_init);
    }
    if (j.contains("tuning")) {
      const auto& t = j.at("tuning");
      reject_unknown(t, {"knn_k", "bandwidth_factors"}, "tuning");
      read(t, "knn_k", c.knn_grid);
      read(t, "bandwidth_factors", c.bandwidth_factors);
    }
    if (j.contains("misspec")) {
      const auto& m = j.at("misspec");
      reject_unknown(m, {"degrees", "sample_size"}, "misspec");
      read(m, "degrees", c.misspec.degrees);
      read(m, "sample_size", c.misspec.sample_size);
    }
    read(j, "seed", c.seed);
    read(j, "test_seed", c.test_seed);
    read(j, "output_dir", c.output_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["problem"] = {{"kind", c.problem.kind},         {"scenarios", c.problem.scenarios},
                  {"holding", c.problem.holding},   {"stockout", c.problem.stockout},
                  {"capacity", c.problem.capacity}, {"alpha", c.problem.alpha},
                  {"flow_lower", c.problem.flow_lower}, {"flow_upper", c.problem.flow_upper},
                  {"flow_target", c.problem.flow_target}};
  j["dgp"] = {{"feature_dim", c.dgp.feature_dim},
              {"feature_scale", c.dgp.feature_scale},
              {"max_entry", c.dgp.max_entry},
              {"degree", c.dgp.degree}};
  j["methods"] = c.methods;
  j["sample_sizes"] = c.sample_sizes;
  j["num_simulations"] = c.num_simulations;
  j["test_size"] = c.test_size;
  j["rho"] = c.rho;
  j["oracle_rho"] = c.oracle_rho;
  j["validation_fraction"] = c.validation_fraction;
  j["hypothesis"] = {{"kind", c.hypothesis.kind}, {"hidden", c.hypothesis.hidden}, {"init_scale", c.hypothesis.init_scale}};
  j["surrogate"] = {{"kind", c.surrogate.kind},
                    {"samples", c.surrogate.samples},
                    {"noise", c.surrogate.noise},
                    {"vertex_fraction", c.surrogate.vertex_fraction},
                    {"concentration", c.surrogate.concentration},
                    {"hidden", c.surrogate.mlp.hidden},
                    {"epochs", c.surrogate.mlp.epochs},
                    {"lr", c.surrogate.mlp.lr},
                    {"batch_size", c.surrogate.mlp.batch_size},
                    {"mape_floor", c.surrogate.mlp.mape_floor},
                    {"order", c.surrogate.order},
                    {"degree", c.surrogate.degree},
                    {"offset", c.surrogate.offset},
                    {"ridge", c.surrogate.ridge}};
  j["training"] = {{"epochs", c.training.epochs},     {"batch_size", c.training.batch_size},
                   {"patience", c.training.patience}, {"eval_every", c.training.eval_every},
                   {"beta1", c.training.beta1},       {"beta2", c.training.beta2},
                   {"eps", c.training.eps},           {"learning_rates", c.training.learning_rates},
                   {"iceo_init", c.training.iceo_init}};
  j["tuning"] = {{"knn_k", c.knn_grid}, {"bandwidth_factors", c.bandwidth_factors}};
  j["misspec"] = {{"degrees", c.misspec.degrees}, {"sample_size", c.misspec.sample_size}};
  j["seed"] = c.seed;
  j["test_seed"] = c.test_seed;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace iceo
