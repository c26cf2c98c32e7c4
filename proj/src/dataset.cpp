#include "iceo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "iceo/format.hpp"

namespace iceo {

std::string to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "unknown";
}

void Dataset::validate() const {
  if (features.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw std::invalid_argument("Dataset: feature rows and labels disagree");
  }
  if (num_scenarios < 2) throw std::invalid_argument("Dataset: need K >= 2");
  for (int k : labels) {
    if (k < 0 || k >= num_scenarios) throw std::invalid_argument("Dataset: label out of range");
  }
  if (!features.allFinite()) throw std::invalid_argument("Dataset: non-finite feature");
}

Dataset Dataset::slice(int begin, int end, Split tag) const {
  if (begin < 0 || end < begin || end > size()) throw std::out_of_range("Dataset::slice");
  Dataset out;
  out.features = features.middleRows(begin, end - begin);
  out.labels.assign(labels.begin() + begin, labels.begin() + end);
  out.num_scenarios = num_scenarios;
  out.split = tag;
  out.seed = seed;
  return out;
}

ProbVector Dataset::label_frequencies() const {
  if (empty()) throw std::invalid_argument("label_frequencies: empty dataset");
  Vector counts = Vector::Zero(num_scenarios);
  for (int k : labels) counts[k] += 1.0;
  return ProbVector(counts / static_cast<double>(labels.size()));
}

Dataset concatenate(const Dataset& a, const Dataset& b) {
  if (a.num_scenarios != b.num_scenarios || a.feature_dim() != b.feature_dim()) {
    throw std::invalid_argument("concatenate: incompatible datasets");
  }
  Dataset out = a;
  out.features.resize(a.size() + b.size(), a.feature_dim());
  out.features << a.features, b.features;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

std::pair<Dataset, Dataset> split_train_validation(const Dataset& data, double validation_fraction) {
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("split_train_validation: fraction must lie in [0, 1)");
  }
  const int n_val = static_cast<int>(std::floor(validation_fraction * data.size() + 1e-9));
  const int n_train = data.size() - n_val;
  return {data.slice(0, n_train, Split::Train), data.slice(n_train, data.size(), Split::Validation)};
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (int j = 0; j < data.feature_dim(); ++j) out << "x_" << (j + 1) << ',';
  out << "scenario_index\n";
  for (int i = 0; i < data.size(); ++i) {
    for (int j = 0; j < data.feature_dim(); ++j) out << format_double(data.features(i, j)) << ',';
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

Dataset read_dataset_csv(const std::string& path, int num_scenarios) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
  const auto p = static_cast<int>(std::count(line.begin(), line.end(), ','));
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    for (int j = 0; j < p; ++j) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error(path + ": short row");
      row.push_back(std::stod(cell));
    }
    if (!std::getline(ss, cell, ',')) throw std::runtime_error(path + ": missing label");
    labels.push_back(std::stoi(cell));
    rows.push_back(std::move(row));
  }
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(rows.size()), p);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < p; ++j) d.features(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  d.labels = std::move(labels);
  d.num_scenarios = num_scenarios;
  d.validate();
  return d;
}

}  // namespace iceo
