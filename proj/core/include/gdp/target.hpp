#pragma once

#include <cstdint>
#include <vector>

#include "gdp/harmonics.hpp"
#include "gdp/linalg.hpp"
#include "gdp/ntk.hpp"

namespace gdp::target {

using harmonics::SphereDim;

/// One zonal term coeff * sqrt(N(d, degree)) * P_degree(<x, pole>).
struct ZonalComponent {
  int degree = 0;
  Vector pole;
  double coeff = 0.0;
};

/// Degree-k0 spherical polynomial built from zonal terms. For a single pole
/// per degree the L2 energy of degree l is coeff^2 and its RKHS norm^2
/// contribution is coeff^2 / mu_l.
struct ZonalTarget {
  SphereDim d;
  int k0 = 0;
  std::vector<ZonalComponent> components;
  std::vector<double> degree_energy;  // L2 energy per degree 0..k0 (c_l^2)
  ntk::KernelSpectrum spectrum;
  double gamma0 = 0.0;

  double rkhs_norm_sq() const;
  double l2_norm_sq() const;
  /// Upper bound on sup |f*|: sum |coeff| sqrt(N(d, degree)).
  double sup_bound() const;
};

struct ZonalOptions {
  /// Poles per active degree. With q > 1 the q terms share one coefficient,
  /// scaled so the degree energy is still c_l^2 (uses the Gram matrix of
  /// P_l(<w_i, w_j>)).
  int poles_per_degree = 1;
};

/// energies[l] = c_l >= 0 for l = 0..k0 (the square root of the degree
/// energy). Requires c_k0 > 0 and sum c_l^2 / mu_l <= gamma0^2, otherwise
/// throws Errc::NormBudgetExceeded / Errc::InvalidArgument.
ZonalTarget make_zonal_target(SphereDim d, int k0, const std::vector<double>& energies,
                              double gamma0, const ntk::KernelSpectrum& spectrum,
                              std::uint64_t pole_seed, ZonalOptions opts = {});

/// f*(x) for every row of x (rows must be unit vectors).
Vector evaluate_target(const ZonalTarget& t, const PointSet& x);

/// Only the terms of one degree.
Vector evaluate_degree(const ZonalTarget& t, int degree, const PointSet& x);

struct TrainingSet {
  PointSet features;
  Vector y;
  Vector f_star;
  double sigma0 = 0.0;
  std::uint64_t data_seed = 0;
  std::uint64_t noise_seed = 0;

  int n() const noexcept { return static_cast<int>(y.size()); }
};

/// Features uniform on the sphere (data stream), y = f*(x) + N(0, sigma0^2)
/// noise (noise stream).
TrainingSet make_training_set(const ZonalTarget& t, int n, double sigma0, std::uint64_t data_seed,
                              std::uint64_t noise_seed);

/// True iff c_l^2 >= beta0^2 mu_l for every degree l <= k0: the per-degree
/// energy form of the minimum-amplitude condition used by degree selection.
bool degree_energy_condition(const ZonalTarget& t, double beta0);

}  // namespace gdp::target
