#pragma once

#include <cstdint>
#include <limits>

namespace sdca {

/// SplitMix64: a counter-based generator. The n-th output is a fixed
/// mixing function of (seed + n * 0x9e3779b97f4a7c15), so a stream is fully
/// described by its 64-bit seed and position. Satisfies
/// UniformRandomBitGenerator, so it plugs into <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Derive an independent child stream, e.g. one per repetition.
  SplitMix64 split() { return SplitMix64((*this)()); }

 private:
  std::uint64_t state_;
};

}  // namespace sdca
