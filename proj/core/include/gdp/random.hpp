#pragma once

#include <cstdint>
#include <random>

namespace gdp {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to turn structured seed tuples into
/// well-separated engine seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for replicate `index` of a stream whose base seed is `base`, tagged by
/// an experiment-level `salt` (e.g. the sample size of a sweep point).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt,
                                    std::uint64_t index) noexcept {
  return mix_seed(mix_seed(base ^ mix_seed(salt)) + index);
}

/// The five independent random streams of an experiment. Changing one seed
/// leaves everything drawn from the other four untouched.
struct SeedStreams {
  std::uint64_t data = 1;   // training features
  std::uint64_t init = 2;   // network initialization
  std::uint64_t noise = 3;  // label noise
  std::uint64_t mc = 4;     // Monte Carlo risk points
  std::uint64_t poles = 5;  // target poles

  friend bool operator==(const SeedStreams&, const SeedStreams&) = default;
};

inline Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed)); }

}  // namespace gdp
