#pragma once

#include <map>
#include <string>

#include "sdca/mlr/model.hpp"
#include "sdca/mlr/penalty.hpp"

namespace sdca::mlr {

/// On-disk model. Layout: a text header
///
///   SDCA-MODEL 1
///   d <d>
///   Q <Q>
///   q <1|2|inf>
///   penalty <exp|capl1>
///   alpha <alpha>
///   lambda <lambda>
///   rho <rho>
///   meta <key> <value>      (zero or more)
///   end
///
/// followed by d*Q doubles of W (row-major) and Q doubles of b, each
/// little-endian IEEE-754 binary64. t is recomputed from W on load.
struct ModelFile {
  ModelState model;
  PenaltyConfig penalty;
  double rho = 0.0;
  std::map<std::string, std::string> metadata;
};

void write_model(const std::string& path, const ModelFile& file);
ModelFile read_model(const std::string& path);

}  // namespace sdca::mlr
