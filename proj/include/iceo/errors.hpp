#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace iceo {

/// A training loop produced a non-finite loss. Carries the epoch and the loss
/// trace recorded up to that point.
class TrainingDivergence : public std::runtime_error {
 public:
  TrainingDivergence(const std::string& what, int epoch, std::vector<double> trace = {})
      : std::runtime_error(what), epoch_(epoch), trace_(std::move(trace)) {}

  int epoch() const { return epoch_; }
  const std::vector<double>& trace() const { return trace_; }

 private:
  int epoch_;
  std::vector<double> trace_;
};

}  // namespace iceo
