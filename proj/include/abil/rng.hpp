#pragma once

// Counter-based deterministic RNG (splitmix64 finalizer applied to a
// seed/counter pair). Unlike stateful engines, the k-th draw of a stream
// depends only on (seed, stream, k), so verification reports are
// byte-for-byte reproducible for a fixed seed and sample count, and
// independent streams can be handed to data-parallel sweeps safely.

#include <cstdint>

namespace abil {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(seed ^ (0xa5a5a5a5a5a5a5a5ull + stream))) {}

  std::uint64_t next_u64() { return splitmix64(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

  // Uniform in [0, 1): 53 mantissa bits of a fresh counter value.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace abil
