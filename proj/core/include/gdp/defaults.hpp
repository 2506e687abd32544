#pragma once

#include <array>
#include <cstdint>

/// Default values for every tunable of the experiment harness. Bump
/// kDefaultsVersion whenever a value changes; it is echoed into every run
/// record so old outputs stay interpretable.
namespace gdp::defaults {

inline constexpr int kDefaultsVersion = 1;

// Model and training.
inline constexpr int kWidth = 4096;
inline constexpr double kKappa = 1.0;
inline constexpr double kEta = 0.5;
inline constexpr double kSigma0 = 0.0;
inline constexpr double kGamma0 = 2.0;
inline constexpr int kMonteCarloPoints = 20000;

// Rate sweep.
inline constexpr std::array<int, 4> kSweepGrid = {500, 1000, 2000, 4000};
inline constexpr int kSeedsPerPoint = 10;

// Degree selection.
inline constexpr double kBeta0 = 2.0;
inline constexpr double kStepScale = 16.0;

// Uniform-convergence audit.
inline constexpr std::array<int, 4> kAuditWidths = {1 << 10, 1 << 12, 1 << 14, 1 << 16};
inline constexpr int kAuditProbes = 50;
inline constexpr int kAuditSeeds = 10;
inline constexpr std::array<double, 3> kAuditBands = {0.05, 0.1, 0.2};

// Spectrum table.
inline constexpr std::array<int, 4> kSpectrumDims = {3, 5, 10, 20};
inline constexpr int kSpectrumMaxDegree = 6;

// Seed streams.
inline constexpr std::uint64_t kSeedData = 1;
inline constexpr std::uint64_t kSeedInit = 2;
inline constexpr std::uint64_t kSeedNoise = 3;
inline constexpr std::uint64_t kSeedMc = 4;
inline constexpr std::uint64_t kSeedPoles = 5;

}  // namespace gdp::defaults
