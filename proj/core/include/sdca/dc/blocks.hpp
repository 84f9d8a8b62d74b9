#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdca/random.hpp"

namespace sdca::dc {

/// Fixed disjoint partition of {0, ..., n-1} into blocks of near-equal size.
/// Indices inside a block are stored in ascending order.
class BlockPartition {
 public:
  BlockPartition() = default;
  BlockPartition(std::size_t n, std::vector<std::vector<std::size_t>> blocks);

  std::size_t size() const { return n_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  std::span<const std::size_t> block(std::size_t k) const { return blocks_[k]; }
  /// Block that owns sample i.
  std::size_t owner(std::size_t i) const { return owner_[i]; }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> owner_;
};

/// Number of blocks used for a batch fraction: ceil(1 / fraction), capped at n.
std::size_t block_count(std::size_t n, double fraction);

/// Random partition plus random reshuffling of the block visiting order at
/// every epoch. Deterministic under the seed.
class BlockSampler {
 public:
  BlockSampler(std::size_t n, double fraction, std::uint64_t seed);

  const BlockPartition& partition() const { return partition_; }

  /// Fresh random permutation of {0, ..., num_blocks-1}.
  std::vector<std::size_t> next_epoch_order();

 private:
  SplitMix64 rng_;
  BlockPartition partition_;
};

}  // namespace sdca::dc
