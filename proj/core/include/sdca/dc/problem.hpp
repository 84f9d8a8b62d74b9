#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

namespace sdca::dc {

using Vector = Eigen::VectorXd;

/// Affine minorant data of a sum of components at a point x:
/// slope = sum_i v_i, offset = sum_i (h_i(x) - <v_i, x>), so that
/// sum_i h_i(y) >= offset + <slope, y> (up to the subgradient tolerance).
struct Linearization {
  Vector slope;
  double offset = 0.0;
};

/// A large sum of DC functions F(x) = (1/n) sum_i [g_i(x) - h_i(x)].
///
/// Implementations must be safe for concurrent const evaluation at a fixed
/// point. Points are flat vectors of length dimension(); values of +inf
/// encode the indicator of a constraint set inside g.
class DcProblem {
 public:
  virtual ~DcProblem() = default;

  /// Number of components n.
  virtual std::size_t size() const = 0;
  virtual std::size_t dimension() const = 0;

  /// F(x) = (1/n) sum_i F_i(x). The default averages component_objective.
  virtual double objective(const Vector& x) const;
  virtual double component_objective(std::size_t i, const Vector& x) const = 0;

  /// G(x) = (1/n) sum_i g_i(x); +inf outside dom g.
  virtual double g_value(const Vector& x) const = 0;
  virtual double h_value(std::size_t i, const Vector& x) const = 0;

  /// An exact element of the subdifferential of h_i at x.
  virtual Vector subgradient_h(std::size_t i, const Vector& x) const = 0;

  /// An element of the eps-subdifferential of h_i at x. With eps == 0 this
  /// must return exactly subgradient_h(i, x).
  virtual Vector eps_subgradient_h(std::size_t i, const Vector& x, double eps) const {
    (void)eps;
    return subgradient_h(i, x);
  }

  /// Sum of the (eps-)linearizations of h_i over `indices`, visited in the
  /// given order. Problems with cheap factored subgradients override this;
  /// the default loops over eps_subgradient_h and h_value.
  virtual Linearization linearize(std::span<const std::size_t> indices, const Vector& x,
                                  double eps) const;

  /// eps-solution of min_x G(x) - <slope, x>, where slope is the averaged
  /// aggregate (1/n) sum_i v_i.
  virtual Vector solve_surrogate(const Vector& slope, double eps) const = 0;

  /// min_i rho(h_i), the strong convexity modulus shared by all h_i.
  virtual double strong_convexity_modulus() const = 0;
};

}  // namespace sdca::dc
