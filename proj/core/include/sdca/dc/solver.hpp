#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sdca/dc/aggregate.hpp"
#include "sdca/dc/errors.hpp"
#include "sdca/dc/problem.hpp"
#include "sdca/dc/schedule.hpp"

namespace sdca::dc {

enum class StopReason {
  kNone,
  kObjectiveStalled,  ///< |F^{e} - F^{e-1}| <= eps_stop between epochs
  kEarlyStopping,     ///< epoch callback asked to stop
  kMaxEpochs,
  kTimeLimit,
  kAborted,  ///< set by callers that catch SolverError
};

std::string to_string(StopReason reason);
StopReason stop_reason_from_string(const std::string& name);

enum class StopRule { kAbsolute, kRelative };

struct SolverConfig {
  double batch_fraction = 0.1;
  std::size_t max_epochs = 1000;
  /// Objective-difference threshold checked at epoch boundaries; <= 0 disables.
  double eps_stop = 1e-6;
  StopRule stop_rule = StopRule::kAbsolute;
  EpsSchedule eps_schedule = EpsSchedule::automatic();
  /// Accept a non-summable eps schedule (a warning is recorded).
  bool allow_nonsummable_schedule = false;
  std::uint64_t seed = 0;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  StalenessMode staleness = StalenessMode::kBlock;

  /// Evaluate F at every iteration instead of only at epoch boundaries.
  bool objective_every_iteration = false;
  /// Spot-check the eps-subgradient inequality on consumed subgradients.
  bool check_eps_subgradients = false;
  std::size_t probes_per_iteration = 10;

  void validate() const;
};

struct TraceRecord {
  std::size_t iteration = 0;  ///< l, the record describes x^l
  std::size_t epoch = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();  ///< F(x^l), NaN if not evaluated
  double surrogate = std::numeric_limits<double>::quiet_NaN();  ///< T^{l-1}(x^l)
  double step_norm = 0.0;                                       ///< ||x^l - x^{l-1}||
  double eps = 0.0;                                             ///< eps^{l-1}
  double seconds = 0.0;
  bool epoch_boundary = false;

  double surrogate_gap() const { return surrogate - objective; }
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  std::vector<std::string> warnings;
  std::size_t eps_checks = 0;
  std::size_t eps_violations = 0;
  std::size_t eps_skipped_probes = 0;

  /// Smallest T^{l-1}(x^l) - F(x^l) over records where both are known.
  double min_surrogate_gap() const;
  /// Records at epoch boundaries, in order.
  std::vector<TraceRecord> epoch_records() const;
};

struct SolverResult {
  Vector x;
  ConvergenceTrace trace;
  StopReason stop_reason = StopReason::kNone;
  std::size_t iterations = 0;
  std::size_t epochs = 0;
  double seconds = 0.0;
};

struct EpochEvent {
  std::size_t epoch;
  std::size_t iteration;
  double objective;
  const Vector& x;
  double seconds;
};

/// Called at every epoch boundary; return true to stop (early stopping).
using EpochCallback = std::function<bool(const EpochEvent&)>;

struct IterationEvent {
  std::size_t iteration;
  const Vector& x;                          ///< x^l
  const AggregatedSubgradient& aggregate;   ///< defines T^l, minimized by x^{l+1}
};

/// Called after the aggregate is refreshed at x^l and before x^{l+1} is solved.
using IterationObserver = std::function<void(const IterationEvent&)>;

struct SolverHooks {
  EpochCallback on_epoch;
  IterationObserver on_iteration;
};

/// Basic full-batch DCA: every iteration linearizes all n components.
SolverResult run_dca(const DcProblem& problem, const Vector& x0, const SolverConfig& config,
                     const SolverHooks& hooks = {});

/// Stochastic DCA: iteration 0 linearizes every component, each later
/// iteration refreshes one block of the fixed partition, visiting blocks in
/// a fresh random order every epoch.
SolverResult run_sdca(const DcProblem& problem, const Vector& x0, const SolverConfig& config,
                      const SolverHooks& hooks = {});

/// Inexact stochastic DCA: as run_sdca, but iteration l consumes
/// eps^l-subgradients and an eps^l-solution of the surrogate.
SolverResult run_isdca(const DcProblem& problem, const Vector& x0, const SolverConfig& config,
                       const SolverHooks& hooks = {});

}  // namespace sdca::dc
