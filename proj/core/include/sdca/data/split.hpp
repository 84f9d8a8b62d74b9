#pragma once

#include <cstdint>

#include "sdca/data/dataset.hpp"

namespace sdca::data {

/// Stratified split: test_fraction of every class goes to test, then
/// validation_fraction of the remaining training rows goes to validation.
struct SplitSpec {
  double test_fraction = 0.2;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct DataSplit {
  Dataset train;  ///< training rows minus validation
  Dataset validation;
  Dataset test;
};

/// Deterministic under the seed. Throws DataError naming the class when a
/// class would be missing from one of the parts.
DataSplit split(const Dataset& dataset, const SplitSpec& spec);

}  // namespace sdca::data
