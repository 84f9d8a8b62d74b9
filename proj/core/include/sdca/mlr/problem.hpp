#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "sdca/data/dataset.hpp"
#include "sdca/dc/problem.hpp"
#include "sdca/dc/solver.hpp"
#include "sdca/mlr/model.hpp"
#include "sdca/mlr/penalty.hpp"

namespace sdca::mlr {

/// Data and constants of the DC decomposition
///   g_i = (rho/2)||(W, b)||^2 + chi_Omega(W, b, t)
///   h_i = (rho/2)||(W, b)||^2 - l_i(W, b) - lambda sum_j eta(t_j)
/// with Omega = {||W_{j,:}||_q <= t_j}. rho must exceed the Lipschitz
/// constant of the loss gradient for h_i to be convex.
struct MlrDcSpec {
  const data::Dataset* dataset = nullptr;
  PenaltyConfig penalty;
  double rho = 0.0;
  double lipschitz = 0.0;

  void validate() const;
};

/// 0.5 * max_i (||x_i||^2 + 1): the softmax Hessian has norm <= 1/2 and the
/// bias acts as a constant feature.
double estimate_lipschitz(const data::Dataset& dataset);

/// Default rho = (1 + 1e-3) * estimate_lipschitz.
inline constexpr double kRhoMargin = 1e-3;

struct ComponentSubgradient {
  Matrix U;  ///< d x Q
  Vector v;  ///< Q
  Vector z;  ///< d, <= 0
};

/// Exact element of the subdifferential of h_i at the model:
/// U_{:,k} = rho W_{:,k} - (p_k - [k == y_i]) x_i, v_k = rho b_k - (p_k - [k == y_i]),
/// z_j = penalty_slope(t_j).
ComponentSubgradient component_subgradient(std::size_t i, const ModelState& model,
                                           const MlrDcSpec& spec);

/// Closed-form minimizer of (rho/2)||(W,b)||^2 + chi_Omega - <U,W> - <v,b> - <z,t>:
/// W_{j,:} = prox_{(-z_j)/rho ||.||_q}(U_{j,:}/rho), b = v/rho, t_j = ||W_{j,:}||_q.
ModelState solve_surrogate(const Matrix& U, const Vector& v, const Vector& z, const MlrDcSpec& spec);

/// Group-sparse multinomial logistic regression as a sum of DC functions.
/// Points use the ModelState::pack layout. The referenced dataset must
/// outlive the problem.
class MlrProblem final : public dc::DcProblem {
 public:
  /// Rejects labels outside 1..Q (with the offending row). rho defaults to
  /// (1 + 1e-3) * estimate_lipschitz.
  MlrProblem(const data::Dataset& dataset, const PenaltyConfig& penalty,
             std::optional<double> rho = std::nullopt);

  const MlrDcSpec& spec() const { return spec_; }
  std::size_t num_features() const { return d_; }
  std::size_t num_classes() const { return q_; }

  std::size_t size() const override { return dataset_->size(); }
  std::size_t dimension() const override { return d_ * q_ + q_ + d_; }

  double objective(const dc::Vector& x) const override;
  double component_objective(std::size_t i, const dc::Vector& x) const override;
  double g_value(const dc::Vector& x) const override;
  double h_value(std::size_t i, const dc::Vector& x) const override;
  dc::Vector subgradient_h(std::size_t i, const dc::Vector& x) const override;
  /// For eps > 0, classes whose logit trails the maximum by more than a
  /// threshold tau(eps, ||x_i||) are dropped from the softmax. The induced
  /// error e satisfies ||e||^2 <= 2 (rho - L) eps, which keeps the result in
  /// the eps-subdifferential.
  dc::Vector eps_subgradient_h(std::size_t i, const dc::Vector& x, double eps) const override;
  dc::Linearization linearize(std::span<const std::size_t> indices, const dc::Vector& x,
                              double eps) const override;
  dc::Vector solve_surrogate(const dc::Vector& slope, double eps) const override;
  /// h_i is only (rho - L)-strongly convex in (W, b); in t it has modulus 0.
  double strong_convexity_modulus() const override { return 0.0; }

  /// Mean negative log-likelihood.
  double loss(const ModelState& model) const;
  /// (1/n) sum_i l_i + lambda sum_j eta(||W_{j,:}||_q).
  double penalized_objective(const ModelState& model) const;

  ModelState state(const dc::Vector& x) const { return ModelState::unpack(x, d_, q_); }
  /// Packs the model with t resynchronized to the row norms.
  dc::Vector point(ModelState model) const;

 private:
  // Residual p - e_y and the logits for sample i; eps > 0 truncates the softmax.
  double residual(std::size_t i, const double* W, const double* b, double eps, Vector& logits,
                  Vector& r) const;
  bool feasible(const dc::Vector& x) const;
  double penalty_sum(const dc::Vector& x) const;

  const data::Dataset* dataset_;
  std::size_t d_;
  std::size_t q_;
  MlrDcSpec spec_;
  Vector sample_sq_norms_;
};

enum class Algorithm { kDca, kSdca, kIsdca };

std::string to_string(Algorithm algorithm);

struct FitResult {
  ModelState model;
  dc::SolverResult solver;
};

/// DCA-l_{q,0}, SDCA-l_{q,0} or ISDCA-l_{q,0} from the given initial model.
FitResult fit(const MlrProblem& problem, Algorithm algorithm, const ModelState& init,
              const dc::SolverConfig& config, const dc::SolverHooks& hooks = {});

}  // namespace sdca::mlr
