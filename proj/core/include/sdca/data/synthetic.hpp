#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "sdca/data/dataset.hpp"

namespace sdca::data {

/// Four Gaussian classes N(mu_k, I) in d = 50; mu_k is 0.5 on features
/// 10(k-1)+1 .. 10k and 0 elsewhere. Classes are balanced.
Dataset generate_sim1(std::size_t n, std::uint64_t seed);

/// Three Gaussian classes N(mu_k, Sigma) in d = 50 with mu_1 = 0,
/// mu_2 = 0.4 and mu_3 = 0.8 on the first 40 features. Sigma is block
/// diagonal with five 10x10 blocks, entry (j, j') = 0.6^|j - j'|.
Dataset generate_sim2(std::size_t n, std::uint64_t seed);

/// Four classes with n_per_class rows each; the first 100 features of class
/// k are N((k-1)/3, 1), the remaining d - 100 are N(0, 1) noise.
Dataset generate_sim3(std::size_t n_per_class, std::size_t d, std::uint64_t seed);

/// Key-value generator description ("kind = sim1", "n = ...", "d = ...",
/// "seed = ..."). For sim3, n is the total and is split evenly over classes.
struct GeneratorSpec {
  std::string kind = "sim1";
  std::size_t n = 1000;
  std::size_t d = 0;  ///< only used by sim3; 0 selects the default 500
  std::uint64_t seed = 0;

  std::string to_text() const;
  static GeneratorSpec parse(const std::string& text);
  static GeneratorSpec load(const std::string& path);
};

Dataset generate(const GeneratorSpec& spec);

}  // namespace sdca::data
