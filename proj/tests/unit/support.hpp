#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "gdp/error.hpp"

namespace test {

/// Error code thrown by fn, or nullopt when it returns normally.
template <class F>
std::optional<gdp::Errc> code_of(F&& fn) {
  try {
    fn();
  } catch (const gdp::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Small generator for property tests: draws case parameters and seeds.
class PropertyRng {
 public:
  explicit PropertyRng(std::uint64_t seed) : rng_(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::uint64_t seed() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace test
