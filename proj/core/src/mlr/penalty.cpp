#include "sdca/mlr/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdca::mlr {

std::string to_string(PenaltyKind kind) {
  return kind == PenaltyKind::kExponential ? "exp" : "capl1";
}

PenaltyKind penalty_kind_from_string(const std::string& name) {
  if (name == "exp" || name == "exponential") return PenaltyKind::kExponential;
  if (name == "capl1" || name == "capped_l1") return PenaltyKind::kCappedL1;
  throw std::invalid_argument("unknown penalty '" + name + "' (expected exp or capl1)");
}

std::string to_string(prox::Norm q) {
  switch (q) {
    case prox::Norm::kL1:
      return "1";
    case prox::Norm::kL2:
      return "2";
    case prox::Norm::kLinf:
      return "inf";
  }
  return "2";
}

prox::Norm norm_from_string(const std::string& name) {
  if (name == "1") return prox::Norm::kL1;
  if (name == "2") return prox::Norm::kL2;
  if (name == "inf") return prox::Norm::kLinf;
  throw std::invalid_argument("unknown norm '" + name + "' (expected 1, 2 or inf)");
}

void PenaltyConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be nonnegative");
}

double penalty_value(double t, const PenaltyConfig& cfg) {
  switch (cfg.kind) {
    case PenaltyKind::kExponential:
      return -std::expm1(-cfg.alpha * t);
    case PenaltyKind::kCappedL1:
      return std::min(1.0, cfg.alpha * t);
  }
  return 0.0;
}

double penalty_slope(double t, const PenaltyConfig& cfg) {
  switch (cfg.kind) {
    case PenaltyKind::kExponential:
      return -cfg.lambda * cfg.alpha * std::exp(-cfg.alpha * t);
    case PenaltyKind::kCappedL1:
      return cfg.alpha * t <= 1.0 ? -cfg.lambda * cfg.alpha : 0.0;
  }
  return 0.0;
}

}  // namespace sdca::mlr
