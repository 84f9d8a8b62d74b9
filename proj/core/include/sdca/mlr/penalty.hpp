#pragma once

#include <string>

#include "sdca/prox/prox.hpp"

namespace sdca::mlr {

enum class PenaltyKind { kExponential, kCappedL1 };

std::string to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(const std::string& name);
std::string to_string(prox::Norm q);
prox::Norm norm_from_string(const std::string& name);

/// Concave approximation of the step function applied to group norms:
/// exponential 1 - exp(-alpha t), capped-l1 min(1, alpha t).
struct PenaltyConfig {
  PenaltyKind kind = PenaltyKind::kExponential;
  double alpha = 1.0;
  double lambda = 0.0;
  prox::Norm q = prox::Norm::kL2;

  void validate() const;
};

/// eta_alpha(t) in [0, 1] for t >= 0.
double penalty_value(double t, const PenaltyConfig& cfg);

/// The t-component z_j of the subgradient of h_i: a subgradient of
/// -lambda * eta_alpha at t, always <= 0. For capped-l1 the tie alpha t = 1
/// selects -lambda alpha.
double penalty_slope(double t, const PenaltyConfig& cfg);

}  // namespace sdca::mlr
