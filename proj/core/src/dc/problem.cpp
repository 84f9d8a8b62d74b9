#include "sdca/dc/problem.hpp"

namespace sdca::dc {

double DcProblem::objective(const Vector& x) const {
  const std::size_t n = size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += component_objective(i, x);
  }
  return sum / static_cast<double>(n);
}

Linearization DcProblem::linearize(std::span<const std::size_t> indices, const Vector& x,
                                   double eps) const {
  Linearization lin;
  lin.slope = Vector::Zero(x.size());
  for (std::size_t i : indices) {
    const Vector v = eps_subgradient_h(i, x, eps);
    lin.slope += v;
    lin.offset += h_value(i, x) - v.dot(x);
  }
  return lin;
}

}  // namespace sdca::dc
