#include "sdca/harness/metrics.hpp"

#include <cmath>

#include "sdca/dc/errors.hpp"

namespace sdca::harness {

std::vector<double> lambda_path(double head, double tail) {
  if (!(tail > 0.0 && head > tail && std::isfinite(head))) {
    throw dc::ConfigError("lambda path needs head > tail > 0");
  }
  // divide by exact powers of ten instead of multiplying by 0.1 repeatedly
  const double slack = 1.0 - 1e-9;
  std::vector<double> path;
  for (int m = 0;; ++m) {
    const double decade = head / std::pow(10.0, m);
    if (decade < tail * slack) break;
    path.push_back(decade);
    const double third = 3.0 * head / std::pow(10.0, m + 1);
    if (third < tail * slack) break;
    path.push_back(third);
  }
  return path;
}

std::vector<std::size_t> selected_features(const mlr::ModelState& model) {
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < model.W.rows(); ++j) {
    if (model.W.row(j).cwiseAbs().maxCoeff() > kSelectionThreshold) {
      out.push_back(static_cast<std::size_t>(j));
    }
  }
  return out;
}

double sparsity_metric(const mlr::ModelState& model) {
  if (model.W.rows() == 0) return 0.0;
  return 100.0 * static_cast<double>(selected_features(model).size()) /
         static_cast<double>(model.W.rows());
}

double accuracy_metric(const mlr::ModelState& model, const data::Dataset& dataset) {
  if (dataset.size() == 0) throw data::DataError("accuracy of an empty dataset");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (mlr::predict(model, dataset.row(i)) == dataset.label(i)) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(dataset.size());
}

bool EarlyStopper::update(double score) {
  if (score > best_) {
    best_ = score;
    stale_ = 0;
    return false;
  }
  ++stale_;
  return stale_ >= patience_;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace sdca::harness
