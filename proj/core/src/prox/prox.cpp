#include "sdca/prox/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sdca::prox {

namespace {

void validate(const ProxQuery& query) {
  if (!(query.c >= 0.0)) throw std::invalid_argument("prox: scale c must be nonnegative");
  if (!(query.rho > 0.0)) throw std::invalid_argument("prox: rho must be positive");
  if (!query.u.allFinite()) throw std::invalid_argument("prox: u must be finite");
}

}  // namespace

double norm(const Vector& w, Norm q) {
  switch (q) {
    case Norm::kL1:
      return w.lpNorm<1>();
    case Norm::kL2:
      return w.norm();
    case Norm::kLinf:
      return w.size() == 0 ? 0.0 : w.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double dual_norm(const Vector& w, Norm q) {
  switch (q) {
    case Norm::kL1:
      return norm(w, Norm::kLinf);
    case Norm::kL2:
      return norm(w, Norm::kL2);
    case Norm::kLinf:
      return norm(w, Norm::kL1);
  }
  return 0.0;
}

double prox_objective(const ProxQuery& query, const Vector& w) {
  return 0.5 * (w - query.u / query.rho).squaredNorm() + (query.c / query.rho) * norm(w, query.q);
}

Vector prox_l1(const ProxQuery& query) {
  validate(query);
  const double threshold = query.c / query.rho;
  Vector out(query.u.size());
  for (Eigen::Index k = 0; k < query.u.size(); ++k) {
    const double a = query.u[k] / query.rho;
    const double mag = std::abs(a) - threshold;
    out[k] = mag > 0.0 ? std::copysign(mag, a) : 0.0;
  }
  return out;
}

Vector prox_l2(const ProxQuery& query) {
  validate(query);
  const double length = query.u.norm();
  if (length <= query.c) {
    return Vector::Zero(query.u.size());
  }
  return (1.0 - query.c / length) * (query.u / query.rho);
}

double l1_ball_threshold(const Vector& w, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("l1 ball radius must be positive");
  if (w.lpNorm<1>() <= radius) return 0.0;
  std::vector<double> mags(static_cast<std::size_t>(w.size()));
  for (Eigen::Index k = 0; k < w.size(); ++k) mags[static_cast<std::size_t>(k)] = std::abs(w[k]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // Largest m with mags[m-1] > (sum_{k<m} mags[k] - radius) / m.
  double cumsum = 0.0;
  double delta = 0.0;
  for (std::size_t m = 0; m < mags.size(); ++m) {
    cumsum += mags[m];
    const double candidate = (cumsum - radius) / static_cast<double>(m + 1);
    if (mags[m] > candidate) {
      delta = candidate;
    } else {
      break;
    }
  }
  return delta;
}

Vector project_l1_ball(const Vector& w, double radius) {
  const double delta = l1_ball_threshold(w, radius);
  if (delta == 0.0) return w;
  Vector out(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double mag = std::abs(w[k]) - delta;
    out[k] = mag > 0.0 ? std::copysign(mag, w[k]) : 0.0;
  }
  return out;
}

Vector prox_linf(const ProxQuery& query) {
  validate(query);
  const Vector v = query.u / query.rho;
  if (query.c == 0.0) {
    return v;
  }
  if (query.u.lpNorm<1>() <= query.c) {
    return Vector::Zero(query.u.size());
  }
  // prox_{k||.||_inf}(v) = v - k * P_{B1}(v / k), with k = c / rho.
  const double k = query.c / query.rho;
  const Vector projected = project_l1_ball(v / k, 1.0);
  return v - k * projected;
}

Vector prox(const ProxQuery& query) {
  switch (query.q) {
    case Norm::kL1:
      return prox_l1(query);
    case Norm::kL2:
      return prox_l2(query);
    case Norm::kLinf:
      return prox_linf(query);
  }
  throw std::invalid_argument("prox: unknown norm");
}

}  // namespace sdca::prox
