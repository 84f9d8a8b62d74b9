#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdca::dc {

/// Invalid solver or problem configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A run aborted mid-way, e.g. because the objective became non-finite.
class SolverError : public std::runtime_error {
 public:
  SolverError(std::size_t iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace sdca::dc
