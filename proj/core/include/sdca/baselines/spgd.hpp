#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

#include "sdca/data/dataset.hpp"
#include "sdca/dc/solver.hpp"
#include "sdca/mlr/model.hpp"

namespace sdca::baselines {

/// Stochastic proximal gradient descent for l_{2,1}-regularized multinomial
/// logistic regression:
///   min (1/n) sum_i l_i(W, b) + lambda sum_j ||W_{j,:}||_2.
struct SpgdConfig {
  enum class StepRule {
    kDecaying,  ///< alpha_l = n / (10 l), l = 1, 2, ...
    kFixed,     ///< alpha_l = fixed_step
  };

  double batch_fraction = 0.1;
  double lambda = 0.0;
  StepRule step_rule = StepRule::kDecaying;
  double fixed_step = 0.0;
  std::size_t max_epochs = 1000;
  /// Objective-difference threshold between epochs; <= 0 disables.
  double eps_stop = 0.0;
  std::uint64_t seed = 0;
  double time_limit_seconds = std::numeric_limits<double>::infinity();

  void validate() const;
};

/// n / (10 l); iterations are 1-based, so l = 0 is rejected.
double decaying_step(std::size_t n, std::size_t l);

/// Row-wise (||U_j|| - threshold)_+ U_j / ||U_j||, written out directly.
mlr::Matrix group_soft_threshold(const mlr::Matrix& U, double threshold);

/// Mean NLL plus lambda * sum_j ||W_{j,:}||_2.
double l21_objective(const data::Dataset& dataset, const mlr::ModelState& model, double lambda);

struct SpgdResult {
  mlr::ModelState model;
  dc::ConvergenceTrace trace;  ///< one record per epoch, objective = l21_objective
  dc::StopReason stop_reason = dc::StopReason::kNone;
  std::size_t iterations = 0;
  std::size_t epochs = 0;
  double seconds = 0.0;
};

/// Each iteration draws the next minibatch (fixed random partition with
/// per-epoch reshuffling, as in the DC engine), takes a gradient step on
/// the mean NLL of the minibatch, then group-soft-thresholds every row of W
/// at alpha_l * lambda via prox_l2. Throws dc::SolverError on non-finite
/// iterates.
SpgdResult run_spgd(const data::Dataset& dataset, const SpgdConfig& config,
                    const mlr::ModelState& model0, const dc::EpochCallback& on_epoch = {});

}  // namespace sdca::baselines
