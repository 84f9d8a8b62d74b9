#include "sdca/dc/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdca/dc/errors.hpp"

namespace sdca::dc {

BlockPartition::BlockPartition(std::size_t n, std::vector<std::vector<std::size_t>> blocks)
    : n_(n), blocks_(std::move(blocks)), owner_(n, blocks_.size()) {
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    std::sort(blocks_[k].begin(), blocks_[k].end());
    for (std::size_t i : blocks_[k]) {
      if (i >= n || owner_[i] != blocks_.size()) {
        throw ConfigError("block partition is not a partition of {0..n-1}");
      }
      owner_[i] = k;
    }
  }
  if (std::find(owner_.begin(), owner_.end(), blocks_.size()) != owner_.end()) {
    throw ConfigError("block partition does not cover every sample");
  }
}

std::size_t block_count(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("batch fraction must lie in (0, 1]");
  }
  // 1 / 0.1 is not exactly 10 in binary; absorb the rounding before ceil.
  const double ratio = 1.0 / fraction;
  const auto count = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
  return std::max<std::size_t>(1, std::min(count, n));
}

BlockSampler::BlockSampler(std::size_t n, double fraction, std::uint64_t seed) : rng_(seed) {
  if (n == 0) {
    throw ConfigError("cannot sample blocks from an empty index set");
  }
  const std::size_t num_blocks = block_count(n, fraction);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng_);

  std::vector<std::vector<std::size_t>> blocks(num_blocks);
  const std::size_t base = n / num_blocks;
  const std::size_t extra = n % num_blocks;
  auto it = perm.begin();
  for (std::size_t k = 0; k < num_blocks; ++k) {
    const std::size_t size = base + (k < extra ? 1 : 0);
    blocks[k].assign(it, it + static_cast<std::ptrdiff_t>(size));
    it += static_cast<std::ptrdiff_t>(size);
  }
  partition_ = BlockPartition(n, std::move(blocks));
}

std::vector<std::size_t> BlockSampler::next_epoch_order() {
  std::vector<std::size_t> order(partition_.num_blocks());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng_);
  return order;
}

}  // namespace sdca::dc
