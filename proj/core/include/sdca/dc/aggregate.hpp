#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "sdca/dc/blocks.hpp"
#include "sdca/dc/problem.hpp"

namespace sdca::dc {

enum class StalenessMode {
  kBlock,      ///< one stored contribution per block (memory #blocks * D)
  kPerSample,  ///< one stored subgradient per sample, for cross-validation
};

/// Table of stale subgradients. Each block keeps the sum of v_i over its
/// samples, evaluated at the iterate where the block was last refreshed;
/// the aggregate is (1/n) times the sum of all block contributions.
class AggregatedSubgradient {
 public:
  static constexpr std::size_t kPerSampleLimit = 10000;
  static constexpr std::size_t kNeverTouched = std::numeric_limits<std::size_t>::max();

  AggregatedSubgradient(BlockPartition partition, std::size_t dimension,
                        StalenessMode mode = StalenessMode::kBlock);

  /// Recompute block k at x with tolerance eps, then re-aggregate.
  void refresh(std::size_t k, const DcProblem& problem, const Vector& x, double eps,
               std::size_t iteration);

  const BlockPartition& partition() const { return partition_; }
  StalenessMode mode() const { return mode_; }

  /// v = (1/n) sum_k contribution_k.
  const Vector& slope() const { return slope_; }
  /// (1/n) sum_i (h_i(x_i) - <v_i, x_i>) over the stored linearizations.
  double offset() const { return offset_; }

  Vector block_contribution(std::size_t k) const;
  std::size_t last_touch(std::size_t k) const { return last_touch_[k]; }

  /// Surrogate T(y) = G(y) - offset - <slope, y>, a majorant of F when every
  /// stored v_i is an exact subgradient.
  double surrogate_value(const DcProblem& problem, const Vector& y) const;

 private:
  void reaggregate();

  BlockPartition partition_;
  StalenessMode mode_;
  std::vector<Vector> slot_slope_;
  std::vector<double> slot_offset_;
  std::vector<std::size_t> last_touch_;
  Vector slope_;
  double offset_ = 0.0;
};

}  // namespace sdca::dc
