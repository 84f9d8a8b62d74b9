#include "sdca/dc/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "sdca/dc/errors.hpp"

namespace sdca::dc {

EpsSchedule EpsSchedule::zero() { return EpsSchedule{}; }

EpsSchedule EpsSchedule::power(std::optional<double> scale, double exponent) {
  EpsSchedule s;
  s.kind_ = Kind::kPower;
  s.scale_ = scale;
  s.exponent_ = exponent;
  return s;
}

EpsSchedule EpsSchedule::explicit_values(std::vector<double> values) {
  EpsSchedule s;
  s.kind_ = Kind::kExplicit;
  s.values_ = std::move(values);
  return s;
}

bool EpsSchedule::summable() const {
  switch (kind_) {
    case Kind::kZero:
    case Kind::kExplicit:
      return true;
    case Kind::kPower:
      return exponent_ > 1.0 || (scale_ && *scale_ == 0.0);
  }
  return false;
}

bool EpsSchedule::has_negative() const {
  switch (kind_) {
    case Kind::kZero:
      return false;
    case Kind::kPower:
      return scale_ && *scale_ < 0.0;
    case Kind::kExplicit:
      return std::any_of(values_.begin(), values_.end(), [](double v) { return !(v >= 0.0); });
  }
  return false;
}

EpsSchedule EpsSchedule::resolved(double initial_objective) const {
  EpsSchedule copy = *this;
  if (needs_initial_objective()) {
    copy.scale_ = 1e-2 * (1.0 + std::abs(initial_objective));
  }
  return copy;
}

double EpsSchedule::at(std::size_t l) const {
  switch (kind_) {
    case Kind::kZero:
      return 0.0;
    case Kind::kPower: {
      if (!scale_) {
        throw ConfigError("automatic eps schedule used before it was resolved");
      }
      return *scale_ / std::pow(static_cast<double>(l) + 1.0, exponent_);
    }
    case Kind::kExplicit:
      return l < values_.size() ? values_[l] : 0.0;
  }
  return 0.0;
}

}  // namespace sdca::dc
