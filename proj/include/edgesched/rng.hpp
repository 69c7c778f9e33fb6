#pragma once

#include <cstdint>

namespace edgesched {

// splitmix64 finalizer; good avalanche, used for seed derivation only
// (instance randomness itself goes through std::mt19937_64).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from (base, index). Runs seeded with
// derive_seed(base, r) are reproducible regardless of execution order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) + index);
}

}  // namespace edgesched
