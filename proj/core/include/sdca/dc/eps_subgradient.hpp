#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "sdca/dc/problem.hpp"

namespace sdca::dc {

struct EpsSubgradientCheck {
  bool holds = true;
  std::size_t violations = 0;
  std::size_t skipped = 0;  ///< probes where f was not finite
  double worst_margin = 0.0;  ///< min over probes of lhs - rhs

  explicit operator bool() const { return holds; }
};

/// Checks 2 eps + f(y) >= f(x) + <v, y - x> + (rho / 4) ||y - x||^2 at every
/// probe y, with 1e-9 slack. This is the inequality satisfied by any
/// eps-subgradient v of a rho-convex f. Probes where f is not finite are
/// skipped and counted.
EpsSubgradientCheck check_eps_subgradient(const std::function<double(const Vector&)>& f,
                                          const Vector& x, const Vector& v, double eps,
                                          double rho, std::span<const Vector> probes);

}  // namespace sdca::dc
