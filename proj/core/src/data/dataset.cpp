#include "sdca/data/dataset.hpp"

#include <cmath>

namespace sdca::data {

double SparseRow::squared_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

Dataset::Dataset(std::size_t dimension, std::size_t num_classes)
    : dimension_(dimension), num_classes_(num_classes) {}

void Dataset::add_row(std::span<const FeatureIndex> indices, std::span<const double> values,
                      int label) {
  const std::size_t row = size();
  if (indices.size() != values.size()) {
    throw DataError("row " + std::to_string(row) + ": index/value count mismatch");
  }
  if (label < 1 || static_cast<std::size_t>(label) > num_classes_) {
    throw DataError("row " + std::to_string(row) + ": label " + std::to_string(label) +
                    " outside 1.." + std::to_string(num_classes_));
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= dimension_) {
      throw DataError("row " + std::to_string(row) + ": feature index " +
                      std::to_string(indices[k]) + " exceeds dimension " +
                      std::to_string(dimension_));
    }
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw DataError("row " + std::to_string(row) + ": feature indices not strictly increasing");
    }
    if (!std::isfinite(values[k])) {
      throw DataError("row " + std::to_string(row) + ": non-finite value");
    }
  }
  indices_.insert(indices_.end(), indices.begin(), indices.end());
  values_.insert(values_.end(), values.begin(), values.end());
  row_ptr_.push_back(indices_.size());
  labels_.push_back(label);
}

void Dataset::add_dense_row(std::span<const double> values, int label) {
  std::vector<FeatureIndex> idx;
  std::vector<double> val;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] != 0.0) {
      idx.push_back(static_cast<FeatureIndex>(j));
      val.push_back(values[j]);
    }
  }
  add_row(idx, val, label);
}

SparseRow Dataset::row(std::size_t i) const {
  const std::size_t begin = row_ptr_[i];
  const std::size_t end = row_ptr_[i + 1];
  return SparseRow{std::span<const FeatureIndex>(indices_.data() + begin, end - begin),
                   std::span<const double>(values_.data() + begin, end - begin)};
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes_, 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y - 1)];
  return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out(dimension_, num_classes_);
  out.provenance = provenance;
  out.label_names = label_names;
  for (std::size_t i : rows) {
    const SparseRow r = row(i);
    out.indices_.insert(out.indices_.end(), r.indices.begin(), r.indices.end());
    out.values_.insert(out.values_.end(), r.values.begin(), r.values.end());
    out.row_ptr_.push_back(out.indices_.size());
    out.labels_.push_back(labels_[i]);
  }
  return out;
}

void Dataset::validate() const {
  if (size() == 0) {
    throw DataError("dataset is empty");
  }
  const auto counts = class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      throw DataError("class " + std::to_string(k + 1) + " has no rows");
    }
  }
}

bool Dataset::operator==(const Dataset& other) const {
  return dimension_ == other.dimension_ && num_classes_ == other.num_classes_ &&
         row_ptr_ == other.row_ptr_ && indices_ == other.indices_ && values_ == other.values_ &&
         labels_ == other.labels_;
}

}  // namespace sdca::data
