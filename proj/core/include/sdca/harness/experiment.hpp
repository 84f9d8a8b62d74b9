#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdca/data/io.hpp"
#include "sdca/data/split.hpp"
#include "sdca/data/standardize.hpp"
#include "sdca/data/synthetic.hpp"
#include "sdca/dc/solver.hpp"
#include "sdca/harness/metrics.hpp"
#include "sdca/mlr/model.hpp"
#include "sdca/mlr/penalty.hpp"

namespace sdca::harness {

enum class Method { kDca, kSdca, kIsdca, kSpgd };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// Either a synthetic generator or a file on disk.
struct DataSource {
  std::optional<data::GeneratorSpec> generator;
  std::string path;
  data::LoadOptions load;
};

struct ExperimentSpec {
  DataSource data;
  Method method = Method::kSdca;
  prox::Norm q = prox::Norm::kL2;
  mlr::PenaltyKind penalty = mlr::PenaltyKind::kExponential;
  std::vector<double> alphas{0.5, 1.0, 2.0, 5.0};
  std::vector<double> lambdas = lambda_path();
  double batch_fraction = 0.1;
  std::size_t patience = 5;
  double eps_stop = 1e-6;
  /// Wall-clock budget of one (repetition, alpha) walk along the path.
  double time_limit_seconds = 7200.0;
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  std::size_t max_epochs = 1000;
  double test_fraction = 0.2;
  double validation_fraction = 0.2;
  bool standardize = true;
  /// Parallel (repetition, alpha) cells; results do not depend on it.
  std::size_t workers = 1;
  /// SPGD only: constant step instead of n / (10 l).
  std::optional<double> spgd_fixed_step;

  void validate() const;
  std::string to_json() const;
  static ExperimentSpec from_json(const std::string& text);
  static ExperimentSpec load(const std::string& path);
};

/// Seeds derived from ExperimentSpec::seed.
std::uint64_t split_seed(const ExperimentSpec& spec, std::size_t repetition);
std::uint64_t solver_seed(const ExperimentSpec& spec, std::size_t repetition, std::size_t alpha_index,
                          std::size_t lambda_index);

/// Loads or generates the data for one repetition and splits it. Generated
/// data is redrawn with generator seed + repetition; the split is reseeded
/// with split_seed. Standardizes when the spec asks for it and then stores
/// the fitted scaler in `scaler` if given.
data::DataSplit prepare_data(const ExperimentSpec& spec, std::size_t repetition,
                             data::Scaler* scaler = nullptr);

struct RunRecord {
  std::size_t repetition = 0;
  std::size_t alpha_index = 0;
  std::size_t lambda_index = 0;
  double alpha = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  double validation_accuracy = 0.0;
  double sparsity = 0.0;
  double objective = 0.0;  ///< last evaluated objective
  double seconds = 0.0;
  std::size_t epochs = 0;
  std::size_t iterations = 0;
  dc::StopReason stop_reason = dc::StopReason::kNone;
  std::string error;  ///< solver message when aborted
  std::vector<std::size_t> selected;
  dc::ConvergenceTrace trace;
};

struct SolveOutcome {
  mlr::ModelState model;
  RunRecord record;
};

/// One solve at (alpha, lambda) from `init`, with validation-accuracy early
/// stopping for the stochastic methods. Solver failures do not throw: the
/// record gets StopReason::kAborted and `init` is returned as the model.
SolveOutcome solve_one(const ExperimentSpec& spec, const data::DataSplit& split, double alpha,
                       double lambda, const mlr::ModelState& init, std::uint64_t seed,
                       double time_budget_seconds);

struct RunReport {
  ExperimentSpec spec;
  std::size_t dimension = 0;
  std::size_t num_classes = 0;
  /// Indexed [repetition][alpha][lambda], flattened in that order.
  std::vector<RunRecord> runs;

  const RunRecord& at(std::size_t repetition, std::size_t alpha_index, std::size_t lambda_index) const;

  /// Per repetition, the run with the best validation accuracy; ties go to
  /// the larger lambda, then to the earlier alpha.
  std::vector<std::size_t> best_runs() const;
};

struct Aggregate {
  double alpha = 0.0;
  double lambda = 0.0;
  MeanStd test_accuracy;
  MeanStd validation_accuracy;
  MeanStd sparsity;
  MeanStd seconds;
  MeanStd epochs;
};

/// Mean and std over repetitions for every (alpha, lambda).
std::vector<Aggregate> aggregate(const RunReport& report);

/// Mean and std over repetitions of the best-validation runs.
Aggregate aggregate_best(const RunReport& report);

/// Full protocol: for each repetition and alpha, walk the lambda path with
/// warm starts (zero model at the head).
RunReport run_path(const ExperimentSpec& spec);

}  // namespace sdca::harness
