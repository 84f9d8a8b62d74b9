#pragma once

#include <optional>
#include <string>

#include "sdca/data/dataset.hpp"

namespace sdca::data {

enum class Format { kLibsvm, kCsv };

Format parse_format(const std::string& name);

struct LoadOptions {
  Format format = Format::kLibsvm;
  /// CSV only: name of the label column.
  std::string label_column = "label";
  /// Feature dimension; inferred from the data when unset.
  std::optional<std::size_t> dimension;
};

/// Reads LibSVM ("label idx:val ...", 1-based indices) or CSV (header row,
/// label in a named column). Labels are remapped to 1..Q in sorted order
/// (numeric when every label parses as a number) and the original label
/// text is kept in label_names. Malformed lines raise DataError with the
/// line number.
Dataset load_sparse_text(const std::string& path, const LoadOptions& options = {});

/// Writes a dataset so that load_sparse_text reproduces it exactly. Values
/// are printed with 17 significant digits.
void write_sparse_text(const Dataset& dataset, const std::string& path, Format format);

}  // namespace sdca::data
