#pragma once

#include <cstdint>

namespace subpop {

/// Counter-based random stream: draw `i` of stream `(seed, stream)` is a pure
/// function of the triple, hashed with three SplitMix64 finalizer rounds.
/// Normal variates use the inverse CDF on the same counter, so every value is
/// reproducible bit-for-bit on any IEEE-754 platform and independent of the
/// order in which draws are requested.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1): (k + 1/2) 2^-53.
  double open_uniform(std::uint64_t counter) const;
  /// Standard normal via inverse CDF of open_uniform(counter).
  double normal(std::uint64_t counter) const;

  /// Sequential convenience: draws counters 0, 1, 2, ...
  double next_uniform() { return uniform(next_++); }
  double next_normal() { return normal(next_++); }
  std::uint64_t next_bits() { return bits(next_++); }
  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t key_;
  std::uint64_t next_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent child seed from a parent seed and a tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Stream ids reserved by the library.
namespace streams {
inline constexpr std::uint64_t kTestJitter = 1;
inline constexpr std::uint64_t kRegionDraw = 2;
inline constexpr std::uint64_t kNoise = 3;
}  // namespace streams

/// The tie-breaking uniform u_j for test point j; shared by the global and
/// region-restricted p-values of that point.
double test_jitter(std::uint64_t seed, std::uint64_t test_index);

}  // namespace subpop
