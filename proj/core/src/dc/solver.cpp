#include "sdca/dc/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "sdca/dc/blocks.hpp"
#include "sdca/dc/eps_subgradient.hpp"
#include "sdca/random.hpp"

namespace sdca::dc {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kNone:
      return "none";
    case StopReason::kObjectiveStalled:
      return "objective_stalled";
    case StopReason::kEarlyStopping:
      return "early_stopping";
    case StopReason::kMaxEpochs:
      return "max_epochs";
    case StopReason::kTimeLimit:
      return "time_limit";
    case StopReason::kAborted:
      return "aborted";
  }
  return "none";
}

StopReason stop_reason_from_string(const std::string& name) {
  for (StopReason r : {StopReason::kNone, StopReason::kObjectiveStalled, StopReason::kEarlyStopping,
                       StopReason::kMaxEpochs, StopReason::kTimeLimit, StopReason::kAborted}) {
    if (to_string(r) == name) return r;
  }
  throw ConfigError("unknown stop reason '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(batch_fraction > 0.0 && batch_fraction <= 1.0)) {
    throw ConfigError("batch_fraction must lie in (0, 1]");
  }
  if (max_epochs == 0) {
    throw ConfigError("max_epochs must be positive");
  }
  if (!(time_limit_seconds > 0.0)) {
    throw ConfigError("time_limit_seconds must be positive");
  }
}

double ConvergenceTrace::min_surrogate_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (std::isfinite(r.objective) && std::isfinite(r.surrogate)) {
      gap = std::min(gap, r.surrogate_gap());
    }
  }
  return gap;
}

std::vector<TraceRecord> ConvergenceTrace::epoch_records() const {
  std::vector<TraceRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [](const TraceRecord& r) { return r.epoch_boundary; });
  return out;
}

namespace {

enum class Mode { kFullBatch, kStochastic, kInexact };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Lemma-style spot check of one consumed subgradient at x.
void spot_check(const DcProblem& problem, const AggregatedSubgradient& agg, std::size_t block,
                const Vector& x, double eps, std::size_t probes, SplitMix64& rng,
                ConvergenceTrace& trace) {
  const auto members = agg.partition().block(block);
  const std::size_t i = members[rng() % members.size()];
  const Vector v = problem.eps_subgradient_h(i, x, eps);
  std::normal_distribution<double> normal;
  constexpr std::array<double, 3> kScales{1e-2, 1e-1, 1.0};
  std::vector<Vector> ys;
  ys.reserve(probes);
  for (std::size_t p = 0; p < probes; ++p) {
    Vector y = x;
    const double scale = kScales[p % kScales.size()];
    for (Eigen::Index j = 0; j < y.size(); ++j) y[j] += scale * normal(rng);
    ys.push_back(std::move(y));
  }
  const auto check = check_eps_subgradient([&](const Vector& y) { return problem.h_value(i, y); },
                                           x, v, eps, problem.strong_convexity_modulus(), ys);
  ++trace.eps_checks;
  trace.eps_violations += check.violations;
  trace.eps_skipped_probes += check.skipped;
}

SolverResult run_engine(const DcProblem& problem, const Vector& x0, const SolverConfig& config,
                        const SolverHooks& hooks, Mode mode) {
  config.validate();
  const std::size_t n = problem.size();
  if (n == 0) {
    throw ConfigError("problem has no components");
  }
  if (static_cast<std::size_t>(x0.size()) != problem.dimension()) {
    throw ConfigError("initial point has the wrong dimension");
  }

  SolverResult result;
  ConvergenceTrace& trace = result.trace;

  EpsSchedule schedule = EpsSchedule::zero();
  if (mode == Mode::kInexact) {
    if (config.eps_schedule.has_negative()) {
      throw ConfigError("eps schedule contains a negative tolerance");
    }
    if (!config.eps_schedule.summable()) {
      if (!config.allow_nonsummable_schedule) {
        throw ConfigError("eps schedule is not summable; set allow_nonsummable_schedule to override");
      }
      trace.warnings.push_back("eps schedule is not summable; convergence is not guaranteed");
    }
  }

  const auto start = Clock::now();
  Vector x = x0;
  const double f0 = problem.objective(x);
  if (!std::isfinite(f0)) {
    throw SolverError(0, "objective is not finite at the initial point");
  }
  if (mode == Mode::kInexact) {
    schedule = config.eps_schedule.resolved(f0);
  }

  std::optional<BlockSampler> sampler;
  BlockPartition partition;
  if (mode == Mode::kFullBatch) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    partition = BlockPartition(n, {std::move(all)});
  } else {
    sampler.emplace(n, config.batch_fraction, config.seed);
    partition = sampler->partition();
  }
  const std::size_t num_blocks = partition.num_blocks();
  AggregatedSubgradient agg(std::move(partition), problem.dimension(), config.staleness);
  SplitMix64 diag_rng(config.seed ^ 0x6a09e667f3bcc908ULL);

  {
    TraceRecord r;
    r.objective = f0;
    r.epoch_boundary = true;
    r.seconds = seconds_since(start);
    trace.records.push_back(r);
  }

  // Iteration 0 linearizes every component.
  std::size_t l = 0;
  double eps = schedule.at(0);
  for (std::size_t k = 0; k < num_blocks; ++k) {
    agg.refresh(k, problem, x, eps, 0);
  }
  if (config.check_eps_subgradients) {
    spot_check(problem, agg, diag_rng() % num_blocks, x, eps, config.probes_per_iteration,
               diag_rng, trace);
  }

  double last_epoch_objective = f0;
  std::vector<std::size_t> order;
  std::size_t order_pos = 0;

  for (;;) {
    if (hooks.on_iteration) {
      hooks.on_iteration(IterationEvent{l, x, agg});
    }
    Vector next = problem.solve_surrogate(agg.slope(), eps);
    if (!next.allFinite()) {
      throw SolverError(l + 1, "surrogate solution is not finite");
    }
    const double surrogate = agg.surrogate_value(problem, next);
    const double step = (next - x).norm();
    x = std::move(next);
    ++l;

    const bool boundary = (l - 1) % num_blocks == 0;
    const std::size_t epoch = (l - 1 + num_blocks - 1) / num_blocks + 1;

    TraceRecord r;
    r.iteration = l;
    r.epoch = epoch;
    r.surrogate = surrogate;
    r.step_norm = step;
    r.eps = eps;
    r.epoch_boundary = boundary;
    if (boundary || config.objective_every_iteration) {
      r.objective = problem.objective(x);
      if (!std::isfinite(r.objective)) {
        throw SolverError(l, "objective is not finite");
      }
    }
    r.seconds = seconds_since(start);
    trace.records.push_back(r);

    if (boundary) {
      result.epochs = epoch;
      const double diff = std::abs(r.objective - last_epoch_objective);
      const double scale =
          config.stop_rule == StopRule::kRelative ? std::max(1.0, std::abs(last_epoch_objective)) : 1.0;
      last_epoch_objective = r.objective;
      if (config.eps_stop > 0.0 && diff <= config.eps_stop * scale) {
        result.stop_reason = StopReason::kObjectiveStalled;
        break;
      }
      if (hooks.on_epoch && hooks.on_epoch(EpochEvent{epoch, l, r.objective, x, r.seconds})) {
        result.stop_reason = StopReason::kEarlyStopping;
        break;
      }
      if (epoch >= config.max_epochs) {
        result.stop_reason = StopReason::kMaxEpochs;
        break;
      }
    }
    if (r.seconds >= config.time_limit_seconds) {
      result.stop_reason = StopReason::kTimeLimit;
      break;
    }

    eps = schedule.at(l);
    std::size_t block = 0;
    if (sampler) {
      if (order_pos == order.size()) {
        order = sampler->next_epoch_order();
        order_pos = 0;
      }
      block = order[order_pos++];
    }
    agg.refresh(block, problem, x, eps, l);
    if (config.check_eps_subgradients) {
      spot_check(problem, agg, block, x, eps, config.probes_per_iteration, diag_rng, trace);
    }
  }

  result.x = std::move(x);
  result.iterations = l;
  result.seconds = seconds_since(start);
  return result;
}

}  // namespace

SolverResult run_dca(const DcProblem& problem, const Vector& x0, const SolverConfig& config,
                     const SolverHooks& hooks) {
  return run_engine(problem, x0, config, hooks, Mode::kFullBatch);
}

SolverResult run_sdca(const DcProblem& problem, const Vector& x0, const SolverConfig& config,
                      const SolverHooks& hooks) {
  return run_engine(problem, x0, config, hooks, Mode::kStochastic);
}

SolverResult run_isdca(const DcProblem& problem, const Vector& x0, const SolverConfig& config,
                       const SolverHooks& hooks) {
  return run_engine(problem, x0, config, hooks, Mode::kInexact);
}

}  // namespace sdca::dc
