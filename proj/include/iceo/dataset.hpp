#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iceo/simplex.hpp"

namespace iceo {

enum class Split { Train, Validation, Test };
std::string to_string(Split s);

/// Features (one row per sample) and 0-based scenario labels.
struct Dataset {
  Matrix features;          // n x p
  std::vector<int> labels;  // n, each in [0, K)
  int num_scenarios = 0;
  Split split = Split::Train;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(labels.size()); }
  int feature_dim() const { return static_cast<int>(features.cols()); }
  Vector x(int i) const { return features.row(i).transpose(); }
  bool empty() const { return labels.empty(); }

  /// Throws unless shapes agree and every label indexes a scenario.
  void validate() const;
  /// Rows [begin, end) as a new dataset with the given split tag.
  Dataset slice(int begin, int end, Split tag) const;
  /// Empirical scenario frequencies of the labels.
  ProbVector label_frequencies() const;
};

Dataset concatenate(const Dataset& a, const Dataset& b);

/// First (1 - fraction) of the rows for training, the rest for validation.
std::pair<Dataset, Dataset> split_train_validation(const Dataset& data, double validation_fraction);

/// Header "x_1,...,x_p,scenario_index"; labels are written 0-based.
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path, int num_scenarios);

}  // namespace iceo
