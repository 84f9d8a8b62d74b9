#include "sdca/baselines/spgd.hpp"

#include <chrono>
#include <cmath>

#include "sdca/dc/blocks.hpp"
#include "sdca/prox/prox.hpp"

namespace sdca::baselines {

void SpgdConfig::validate() const {
  if (!(batch_fraction > 0.0 && batch_fraction <= 1.0)) {
    throw dc::ConfigError("batch_fraction must lie in (0, 1]");
  }
  if (!(lambda >= 0.0)) throw dc::ConfigError("lambda must be nonnegative");
  if (step_rule == StepRule::kFixed && !(fixed_step > 0.0)) {
    throw dc::ConfigError("fixed step must be positive");
  }
  if (max_epochs == 0) throw dc::ConfigError("max_epochs must be positive");
}

double decaying_step(std::size_t n, std::size_t l) {
  if (l == 0) throw dc::ConfigError("the decaying step is defined for l >= 1");
  return static_cast<double>(n) / (10.0 * static_cast<double>(l));
}

mlr::Matrix group_soft_threshold(const mlr::Matrix& U, double threshold) {
  mlr::Matrix W(U.rows(), U.cols());
  for (Eigen::Index j = 0; j < U.rows(); ++j) {
    const double length = U.row(j).norm();
    if (length > threshold) {
      W.row(j) = ((length - threshold) / length) * U.row(j);
    } else {
      W.row(j).setZero();
    }
  }
  return W;
}

double l21_objective(const data::Dataset& dataset, const mlr::ModelState& model, double lambda) {
  double loss = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    loss += mlr::nll_loss(model, dataset.row(i), dataset.label(i));
  }
  double group = 0.0;
  for (Eigen::Index j = 0; j < model.W.rows(); ++j) group += model.W.row(j).norm();
  return loss / static_cast<double>(dataset.size()) + lambda * group;
}

SpgdResult run_spgd(const data::Dataset& dataset, const SpgdConfig& config,
                    const mlr::ModelState& model0, const dc::EpochCallback& on_epoch) {
  config.validate();
  const std::size_t n = dataset.size();
  if (n == 0) throw dc::ConfigError("dataset is empty");
  if (model0.dimension() != dataset.dimension() || model0.num_classes() != dataset.num_classes()) {
    throw dc::ConfigError("initial model does not match the dataset dimensions");
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  dc::BlockSampler sampler(n, config.batch_fraction, config.seed);

  SpgdResult result;
  mlr::ModelState model = model0;
  double last = l21_objective(dataset, model, config.lambda);
  {
    dc::TraceRecord r;
    r.objective = last;
    r.epoch_boundary = true;
    result.trace.records.push_back(r);
  }

  prox::ProxQuery query;
  query.rho = 1.0;
  query.q = prox::Norm::kL2;
  mlr::Matrix grad_w(model.W.rows(), model.W.cols());
  mlr::Vector grad_b(model.b.size());

  std::size_t l = 0;
  for (std::size_t epoch = 1;; ++epoch) {
    const mlr::Matrix w_start = model.W;
    for (std::size_t block : sampler.next_epoch_order()) {
      ++l;
      const double step =
          config.step_rule == SpgdConfig::StepRule::kFixed ? config.fixed_step : decaying_step(n, l);
      const auto members = sampler.partition().block(block);
      grad_w.setZero();
      grad_b.setZero();
      for (std::size_t i : members) {
        const data::SparseRow x = dataset.row(i);
        mlr::Vector r = mlr::softmax_probabilities(model, x);
        r[dataset.label(i) - 1] -= 1.0;
        for (std::size_t k = 0; k < x.nnz(); ++k) grad_w.row(x.indices[k]) += x.values[k] * r.transpose();
        grad_b += r;
      }
      const double scale = step / static_cast<double>(members.size());
      const mlr::Matrix u_bar = model.W - scale * grad_w;
      query.c = step * config.lambda;
      for (Eigen::Index j = 0; j < u_bar.rows(); ++j) {
        query.u = u_bar.row(j).transpose();
        model.W.row(j) = prox::prox_l2(query).transpose();
      }
      model.b -= scale * grad_b;
      if (!model.W.allFinite() || !model.b.allFinite()) {
        throw dc::SolverError(l, "SPGD iterate is not finite");
      }
    }

    const double objective = l21_objective(dataset, model, config.lambda);
    if (!std::isfinite(objective)) throw dc::SolverError(l, "SPGD objective is not finite");
    dc::TraceRecord r;
    r.iteration = l;
    r.epoch = epoch;
    r.objective = objective;
    r.step_norm = (model.W - w_start).norm();
    r.seconds = elapsed();
    r.epoch_boundary = true;
    result.trace.records.push_back(r);
    result.epochs = epoch;

    const double diff = std::abs(objective - last);
    last = objective;
    if (config.eps_stop > 0.0 && diff <= config.eps_stop) {
      result.stop_reason = dc::StopReason::kObjectiveStalled;
      break;
    }
    if (on_epoch) {
      mlr::ModelState snapshot = model;
      snapshot.sync_group_norms(prox::Norm::kL2);
      const dc::Vector x = snapshot.pack();
      if (on_epoch(dc::EpochEvent{epoch, l, objective, x, r.seconds})) {
        result.stop_reason = dc::StopReason::kEarlyStopping;
        break;
      }
    }
    if (epoch >= config.max_epochs) {
      result.stop_reason = dc::StopReason::kMaxEpochs;
      break;
    }
    if (r.seconds >= config.time_limit_seconds) {
      result.stop_reason = dc::StopReason::kTimeLimit;
      break;
    }
  }

  model.sync_group_norms(prox::Norm::kL2);
  result.model = std::move(model);
  result.iterations = l;
  result.seconds = elapsed();
  return result;
}

}  // namespace sdca::baselines
