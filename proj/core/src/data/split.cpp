#include "sdca/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdca/random.hpp"

namespace sdca::data {

DataSplit split(const Dataset& dataset, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) ||
      !(spec.validation_fraction >= 0.0 && spec.validation_fraction < 1.0)) {
    throw DataError("split fractions must lie in (0, 1)");
  }
  SplitMix64 rng(spec.seed);
  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[static_cast<std::size_t>(dataset.label(i) - 1)].push_back(i);
  }

  std::vector<std::size_t> train, validation, test;
  for (std::size_t k = 0; k < by_class.size(); ++k) {
    auto& rows = by_class[k];
    std::shuffle(rows.begin(), rows.end(), rng);
    const std::size_t n = rows.size();
    const auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(
        std::llround(spec.validation_fraction * static_cast<double>(n - n_test)));
    const std::size_t n_train = n - n_test - n_val;
    if (n_test == 0 || n_train == 0 || (spec.validation_fraction > 0.0 && n_val == 0)) {
      throw DataError("class " + std::to_string(k + 1) + " has too few rows (" + std::to_string(n) +
                      ") to appear in every split part");
    }
    test.insert(test.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    validation.insert(validation.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test),
                      rows.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
    train.insert(train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), rows.end());
  }
  for (auto* part : {&train, &validation, &test}) std::sort(part->begin(), part->end());

  DataSplit out{dataset.subset(train), dataset.subset(validation), dataset.subset(test)};
  std::ostringstream tag;
  tag << " split(seed=" << spec.seed << ")";
  out.train.provenance += tag.str() + ":train";
  out.validation.provenance += tag.str() + ":validation";
  out.test.provenance += tag.str() + ":test";
  return out;
}

}  // namespace sdca::data
