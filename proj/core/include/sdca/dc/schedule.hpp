#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace sdca::dc {

/// Tolerance sequence eps^l for the inexact solver.
///
/// kPower: eps^l = scale / (l + 1)^exponent, summable iff exponent > 1.
/// kExplicit: the listed values, then zero; always summable.
/// An unset scale in kPower means "automatic": 1e-2 * (1 + |F(x^0)|).
class EpsSchedule {
 public:
  enum class Kind { kZero, kPower, kExplicit };

  static EpsSchedule zero();
  static EpsSchedule power(std::optional<double> scale, double exponent);
  static EpsSchedule explicit_values(std::vector<double> values);
  /// 1e-2 * (1 + |F(x^0)|) / (l + 1)^2.
  static EpsSchedule automatic() { return power(std::nullopt, 2.0); }

  Kind kind() const { return kind_; }
  bool summable() const;
  bool has_negative() const;
  bool needs_initial_objective() const { return kind_ == Kind::kPower && !scale_; }

  /// Returns a copy with the automatic scale fixed from F(x^0).
  EpsSchedule resolved(double initial_objective) const;

  double at(std::size_t l) const;

 private:
  Kind kind_ = Kind::kZero;
  std::optional<double> scale_;
  double exponent_ = 2.0;
  std::vector<double> values_;
};

}  // namespace sdca::dc
