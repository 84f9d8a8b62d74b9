#pragma once

#include <Eigen/Core>

namespace sdca::prox {

using Vector = Eigen::VectorXd;

enum class Norm { kL1, kL2, kLinf };

/// Row-wise proximal query: returns argmin_w (1/2)||w - u / rho||^2 + (c / rho) ||w||_q.
/// In the group-sparse surrogate, u is a row of the aggregated subgradient
/// and c = -z_j >= 0 is the penalty weight of that row.
struct ProxQuery {
  Vector u;
  double c = 0.0;
  double rho = 1.0;
  Norm q = Norm::kL2;
};

/// Componentwise soft-thresholding of u / rho at level c / rho.
Vector prox_l1(const ProxQuery& query);

/// Block soft-thresholding: zero when ||u||_2 <= c, else (1 - c / ||u||_2) u / rho.
Vector prox_l2(const ProxQuery& query);

/// Via the Moreau identity with the l1-ball projection; zero when ||u||_1 <= c.
Vector prox_linf(const ProxQuery& query);

/// Dispatches on query.q.
Vector prox(const ProxQuery& query);

/// Euclidean projection onto {v : ||v||_1 <= radius} using a sort of the
/// magnitudes, O(Q log Q). Points already inside the ball are returned as is.
Vector project_l1_ball(const Vector& w, double radius);

/// The threshold delta > 0 with sum_k (|w_k| - delta)_+ = radius, or 0 when
/// ||w||_1 <= radius.
double l1_ball_threshold(const Vector& w, double radius);

/// ||w||_q.
double norm(const Vector& w, Norm q);
/// The dual norm ||w||_{q*} (linf for l1, l2 for l2, l1 for linf).
double dual_norm(const Vector& w, Norm q);

/// Value of (1/2)||w - u / rho||^2 + (c / rho) ||w||_q.
double prox_objective(const ProxQuery& query, const Vector& w);

}  // namespace sdca::prox
