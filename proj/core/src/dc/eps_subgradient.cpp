#include "sdca/dc/eps_subgradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdca/dc/errors.hpp"

namespace sdca::dc {

EpsSubgradientCheck check_eps_subgradient(const std::function<double(const Vector&)>& f,
                                          const Vector& x, const Vector& v, double eps,
                                          double rho, std::span<const Vector> probes) {
  if (eps < 0.0 || rho < 0.0) {
    throw ConfigError("eps and rho must be nonnegative");
  }
  constexpr double kSlack = 1e-9;
  EpsSubgradientCheck result;
  result.worst_margin = std::numeric_limits<double>::infinity();
  const double fx = f(x);
  for (const Vector& y : probes) {
    const double fy = f(y);
    if (!std::isfinite(fy) || !std::isfinite(fx)) {
      ++result.skipped;
      continue;
    }
    const Vector diff = y - x;
    const double lhs = 2.0 * eps + fy;
    const double rhs = fx + v.dot(diff) + 0.25 * rho * diff.squaredNorm();
    const double margin = lhs - rhs;
    result.worst_margin = std::min(result.worst_margin, margin);
    if (margin < -kSlack) {
      ++result.violations;
      result.holds = false;
    }
  }
  return result;
}

}  // namespace sdca::dc
