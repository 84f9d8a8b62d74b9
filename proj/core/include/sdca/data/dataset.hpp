#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdca::data {

using FeatureIndex = std::uint32_t;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One observation in sparse form; indices are 0-based and strictly increasing.
struct SparseRow {
  std::span<const FeatureIndex> indices;
  std::span<const double> values;

  std::size_t nnz() const { return indices.size(); }
  double squared_norm() const;
};

/// Labeled sparse observations stored row-compressed. Labels are 1..Q.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dimension, std::size_t num_classes);

  /// Appends a row. Indices must be strictly increasing and < dimension(),
  /// values finite, label in 1..num_classes().
  void add_row(std::span<const FeatureIndex> indices, std::span<const double> values, int label);
  void add_dense_row(std::span<const double> values, int label);

  std::size_t size() const { return labels_.size(); }
  std::size_t dimension() const { return dimension_; }
  std::size_t num_classes() const { return num_classes_; }

  SparseRow row(std::size_t i) const;
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }
  std::size_t nnz() const { return indices_.size(); }

  /// Number of rows per class, indexed 0..Q-1.
  std::vector<std::size_t> class_counts() const;

  /// Rows at the given positions, in that order; metadata is carried over.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Checks every class is represented and all rows are well formed.
  void validate() const;

  /// Where the data came from (file path, generator spec, split seeds).
  std::string provenance;
  /// Original label text of class k is label_names[k - 1]; empty if generated.
  std::vector<std::string> label_names;

  bool operator==(const Dataset& other) const;

 private:
  std::size_t dimension_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<FeatureIndex> indices_;
  std::vector<double> values_;
  std::vector<int> labels_;
};

}  // namespace sdca::data
