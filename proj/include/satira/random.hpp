#pragma once

#include <cstdint>
#include <random>

namespace satira {

// Independent per-component streams derived from one top-level seed:
// The train/test split consumes the top-level seed as-is.
enum class RandomStream : std::uint64_t { CnnInit = 2, CnnShuffle = 3 };

// splitmix64 finalizer over (seed, stream).
constexpr std::uint64_t derive_seed(std::uint64_t seed, RandomStream stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1) from the top 53 bits; identical on every standard library.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace satira
