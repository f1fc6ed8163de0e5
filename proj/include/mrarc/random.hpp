#pragma once

#include <cstdint>

namespace mrarc {

/// SplitMix64 step; used to expand seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Mixes two 64-bit values into a seed (for per-cell seed schedules).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// xoshiro256** 1.0 generator seeded by four SplitMix64 outputs of `seed`.
/// Every derived draw below is defined in terms of next() only, so streams
/// are reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on [0, 1) from the top 53 bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer on [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal by the Box-Muller transform, no cached second value.
  double normal();

 private:
  std::uint64_t s_[4];
};

}  // namespace mrarc
