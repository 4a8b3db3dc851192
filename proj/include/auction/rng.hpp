#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "auction/rational.hpp"

namespace auction {

// Deterministic random stream.  mt19937_64 output is fully specified by the
// standard, so the same seed reproduces the same draws on every platform.
// Exact-probability draws (bernoulli, pick_weighted) refine a lazily extended
// binary expansion of a uniform variate until the comparison is decided.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  // Independent substream; derivation depends only on (seed, stream_id).
  RandomStream split(std::uint64_t stream_id) const;

  std::uint64_t u64();
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // 53-bit uniform double in [0, 1).
  double u01();

  // True with probability exactly p (clamped to [0,1]).
  bool bernoulli(const Rat& p);
  // Index k with probability weights[k] / sum(weights), exactly.
  std::size_t pick_weighted(const std::vector<Rat>& weights);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace auction
