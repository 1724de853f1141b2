#include "subpop/rng.hpp"

#include "subpop/error.hpp"
#include "subpop/normal.hpp"

namespace subpop {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ (tag * 0xD1B54A32D192ED03ULL));
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream)
    : key_(derive_seed(seed, stream)) {}

std::uint64_t CounterStream::bits(std::uint64_t counter) const {
  return splitmix64(key_ ^ splitmix64(counter));
}

double CounterStream::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterStream::open_uniform(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterStream::normal(std::uint64_t counter) const {
  return normal_quantile(open_uniform(counter));
}

std::uint64_t CounterStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw PreconditionError("next_below: bound must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t b = next_bits();
    if (b < limit) return b % bound;
  }
}

double test_jitter(std::uint64_t seed, std::uint64_t test_index) {
  return CounterStream(seed, streams::kTestJitter).uniform(test_index);
}

}  // namespace subpop
