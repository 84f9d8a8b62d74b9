#pragma once

#include <iosfwd>
#include <vector>

#include "sdca/data/dataset.hpp"
#include "sdca/data/split.hpp"

namespace sdca::data {

/// Per-feature affine map x -> (x - mean) / scale fitted on training data.
/// Features whose variance is below 1e-12 are left untouched.
class Scaler {
 public:
  static constexpr double kVarianceFloor = 1e-12;

  static Scaler fit(const Dataset& train);

  Dataset transform(const Dataset& dataset) const;

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }
  bool is_constant(std::size_t j) const { return constant_[j] != 0; }

  void write(std::ostream& out) const;
  static Scaler read(std::istream& in);

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<char> constant_;
};

/// Fits on split.train and transforms all three parts in place.
Scaler standardize(DataSplit& split);

}  // namespace sdca::data
