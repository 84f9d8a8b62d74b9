#include "sdca/dc/aggregate.hpp"

#include <array>

#include "sdca/dc/errors.hpp"

namespace sdca::dc {

AggregatedSubgradient::AggregatedSubgradient(BlockPartition partition, std::size_t dimension,
                                             StalenessMode mode)
    : partition_(std::move(partition)), mode_(mode) {
  const std::size_t slots =
      mode_ == StalenessMode::kBlock ? partition_.num_blocks() : partition_.size();
  if (mode_ == StalenessMode::kPerSample && partition_.size() > kPerSampleLimit) {
    throw ConfigError("per-sample staleness mode is limited to n <= 10000");
  }
  slot_slope_.assign(slots, Vector::Zero(static_cast<Eigen::Index>(dimension)));
  slot_offset_.assign(slots, 0.0);
  last_touch_.assign(partition_.num_blocks(), kNeverTouched);
  slope_ = Vector::Zero(static_cast<Eigen::Index>(dimension));
}

void AggregatedSubgradient::refresh(std::size_t k, const DcProblem& problem, const Vector& x,
                                    double eps, std::size_t iteration) {
  const auto members = partition_.block(k);
  if (mode_ == StalenessMode::kBlock) {
    Linearization lin = problem.linearize(members, x, eps);
    slot_slope_[k] = std::move(lin.slope);
    slot_offset_[k] = lin.offset;
  } else {
    for (std::size_t i : members) {
      const std::array<std::size_t, 1> one{i};
      Linearization lin = problem.linearize(one, x, eps);
      slot_slope_[i] = std::move(lin.slope);
      slot_offset_[i] = lin.offset;
    }
  }
  last_touch_[k] = iteration;
  reaggregate();
}

// Exact re-summation in fixed slot order; O(#slots * D), no drift.
void AggregatedSubgradient::reaggregate() {
  const double n = static_cast<double>(partition_.size());
  Vector total = slot_slope_.front();
  double offset = slot_offset_.front();
  for (std::size_t s = 1; s < slot_slope_.size(); ++s) {
    total += slot_slope_[s];
    offset += slot_offset_[s];
  }
  slope_ = total / n;
  offset_ = offset / n;
}

Vector AggregatedSubgradient::block_contribution(std::size_t k) const {
  if (mode_ == StalenessMode::kBlock) {
    return slot_slope_[k];
  }
  Vector sum = Vector::Zero(slope_.size());
  for (std::size_t i : partition_.block(k)) {
    sum += slot_slope_[i];
  }
  return sum;
}

double AggregatedSubgradient::surrogate_value(const DcProblem& problem, const Vector& y) const {
  return problem.g_value(y) - offset_ - slope_.dot(y);
}

}  // namespace sdca::dc
