#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "gdp/linalg.hpp"

/// Harmonic analysis on the unit sphere S^{d-1}: dimension-d Legendre
/// (Gegenbauer) polynomials, harmonic-space dimensions, the normalized
/// surface measure of <x, w> and quadrature rules for it, and uniform
/// sampling of the sphere.
namespace gdp::harmonics {

/// Ambient dimension d of the sphere S^{d-1}. Only d >= 3 is representable.
class SphereDim {
 public:
  explicit SphereDim(int d);

  int value() const noexcept { return d_; }
  /// Exponent (d-3)/2 of the weight (1 - t^2)^{(d-3)/2}.
  double weight_exponent() const noexcept { return 0.5 * (d_ - 3); }

  friend bool operator==(SphereDim, SphereDim) = default;

 private:
  int d_;
};

/// Dimension-d Legendre polynomial P_k(t), normalized so that P_k(1) = 1.
/// |t| slightly above 1 (by at most 1e-12) is clamped.
double legendre_p(int k, SphereDim d, double t);

/// P_0(t), ..., P_kmax(t) from one pass of the recurrence.
std::vector<double> legendre_all(int kmax, SphereDim d, double t);

/// N(d, k), the dimension of the degree-k spherical harmonics. N(d, 0) = 1.
/// Throws Errc::InvalidArgument when the value does not fit in 64 bits.
std::uint64_t harmonic_dim(SphereDim d, int k);

/// log N(d, k) via log-Gamma; usable far beyond the 64-bit range.
double log_harmonic_dim(SphereDim d, int k);

/// m_k = sum_{l <= k} N(d, l).
std::uint64_t cumulative_dim(SphereDim d, int k);

/// omega_{d-2} / omega_{d-1}, where omega_{d-1} = 2 pi^{d/2} / Gamma(d/2) is
/// the surface area of S^{d-1}.
double surface_ratio(SphereDim d);

/// Nodes and weights for integrals against the normalized (probability)
/// measure of t = <x, w> with x uniform on S^{d-1}:
///   sum_i w_i f(t_i) ~ (omega_{d-2}/omega_{d-1}) int f(t) (1-t^2)^{(d-3)/2} dt.
struct QuadratureRule {
  SphereDim d;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Gauss rule for the weight (1-t^2)^{(d-3)/2} (Gauss-Jacobi with
/// alpha = beta = (d-3)/2), exact for polynomials of degree <= 2 n_nodes - 1.
/// Weights are pre-multiplied by surface_ratio(d) so they sum to one.
QuadratureRule make_quadrature(SphereDim d, int n_nodes);

/// Rule for profiles that are not smooth in t (jumps at t = 0, square-root
/// behaviour at t = +-1). Substitutes t = cos(theta) and applies a
/// Gauss-Legendre rule with n_nodes / 2 points on each of [0, pi/2] and
/// [pi/2, pi]. n_nodes must be even.
QuadratureRule make_angular_quadrature(SphereDim d, int n_nodes);

/// n points drawn i.i.d. uniformly from S^{d-1} (Gaussian draw, normalized),
/// one per row.
PointSet sample_sphere(SphereDim d, int n, std::mt19937_64& rng);
PointSet sample_sphere(SphereDim d, int n, std::uint64_t seed);

/// Throws Errc::NotOnSphere if some row's norm differs from 1 by more than tol.
void require_on_sphere(const PointSet& x, double tol = 1e-9);

}  // namespace gdp::harmonics
