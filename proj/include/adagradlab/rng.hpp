#pragma once

#include <cstdint>
#include <random>

namespace adagradlab::rng {

/// splitmix64 finalizer; the standard 64-bit mixing step.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Counter-based stream derivation: every consumer of randomness gets its
/// own generator keyed by (seed, lane, counter), so evaluation order and
/// thread scheduling cannot change results.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t lane = 0,
                            std::uint64_t counter = 0) {
  return mix64(mix64(mix64(seed) ^ lane) ^ counter);
}

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t lane = 0,
                              std::uint64_t counter = 0) {
  return std::mt19937_64(derive(seed, lane, counter));
}

}  // namespace adagradlab::rng
