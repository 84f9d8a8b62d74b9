#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "sdca/data/dataset.hpp"
#include "sdca/mlr/model.hpp"

namespace sdca::harness {

/// Decade ladder head, 0.3 head, head/10, 0.03 head, ... down to tail
/// (inclusive up to rounding). Throws dc::ConfigError unless head > tail > 0.
std::vector<double> lambda_path(double head = 1e4, double tail = 1e-3);

inline constexpr double kSelectionThreshold = 1e-8;

/// Feature j is selected when max_k |W_{j,k}| > 1e-8.
std::vector<std::size_t> selected_features(const mlr::ModelState& model);

/// Percentage of selected features.
double sparsity_metric(const mlr::ModelState& model);

/// Percentage of rows whose argmax logit (ties to the smallest class)
/// matches the label.
double accuracy_metric(const mlr::ModelState& model, const data::Dataset& dataset);

/// Patience-based early stopping on a score that should increase.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  /// Records one epoch's score; true once `patience` consecutive epochs
  /// failed to beat the best score so far.
  bool update(double score);

  double best() const { return best_; }
  std::size_t stale_epochs() const { return stale_; }

 private:
  std::size_t patience_;
  double best_ = -std::numeric_limits<double>::infinity();
  std::size_t stale_ = 0;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation; 0 for a single value
};

MeanStd mean_std(const std::vector<double>& values);

}  // namespace sdca::harness
