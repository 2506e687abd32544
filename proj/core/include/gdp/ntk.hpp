#pragma once

#include <string_view>
#include <vector>

#include "gdp/harmonics.hpp"
#include "gdp/linalg.hpp"

namespace gdp::ntk {

using harmonics::QuadratureRule;
using harmonics::SphereDim;

/// Angular profiles t = <u, v> -> kernel value.
///   K0(t)   = (pi - arccos t) / (2 pi)
///   K1(t)   = t K0(t)
///   K(t)    = K0(t) + K1(t), the NTK of the augmented two-layer network
///   Step(t) = 1{t >= 0}
enum class KernelProfile { K0, K1, K, Step };

std::string_view to_string(KernelProfile p) noexcept;

/// Profile value. Inner products within 1e-9 of [-1, 1] are clamped; anything
/// further out throws Errc::NotOnSphere (the inputs were not normalized).
double kernel_value(KernelProfile profile, double t);

/// Degree-l Funk-Hecke coefficient
///   (omega_{d-2}/omega_{d-1}) int profile(t) P_l(t) (1-t^2)^{(d-3)/2} dt
/// evaluated with the given rule.
double eigenvalue_quadrature(KernelProfile profile, int degree, const QuadratureRule& rule);

/// s_k, the degree-k Funk-Hecke coefficient of the step profile, in closed
/// form: s_0 = 1/2, s_{2t} = 0, and s_{2t-1} from a Gamma-function product
/// evaluated in log space with the sign (-1)^{t-1} tracked separately.
double s_closed_form(int k, SphereDim d);

enum class SpectrumMethod { ClosedForm, Quadrature };

/// Per-degree eigenvalues of the integral operators of K0, K1 and K under the
/// uniform measure on S^{d-1}. Index l holds the eigenvalue on the degree-l
/// harmonics (multiplicity N(d, l)).
struct KernelSpectrum {
  SphereDim d;
  int max_degree = 0;
  std::vector<double> mu;       // K = K0 + K1
  std::vector<double> lambda0;  // K0
  std::vector<double> lambda1;  // K1
  SpectrumMethod method = SpectrumMethod::ClosedForm;

  double mu_at(int degree) const;
};

/// lambda0_k = s_k^2; lambda1_0 = lambda0_1;
/// lambda1_k = k/(2k+d-2) lambda0_{k-1} + (k+d-2)/(2k+d-2) lambda0_{k+1};
/// mu_k = lambda0_k + lambda1_k.
KernelSpectrum spectrum_closed_form(SphereDim d, int max_degree);

/// Same quantities by direct Funk-Hecke quadrature of the three profiles.
KernelSpectrum spectrum_quadrature(SphereDim d, int max_degree, const QuadratureRule& rule);

/// Uses the default profile rule: make_angular_quadrature(d, kDefaultProfileNodes).
KernelSpectrum spectrum_quadrature(SphereDim d, int max_degree);

inline constexpr int kDefaultProfileNodes = 256;

/// Each mu_l repeated N(d, l) times for l = 0..spectrum.max_degree, truncated
/// to at most `count` entries. This is the non-increasing enumeration of the
/// operator eigenvalues whenever mu is decreasing.
std::vector<double> extended_eigenvalues(const KernelSpectrum& spectrum, std::size_t count);

// ---------------------------------------------------------------------------
// Finite-width Monte Carlo estimators. W holds one weight vector per row,
// rows drawn N(0, kappa^2 I_d).

/// h(W, u, v) = (1/m) sum_r 1{w_r.u >= 0} 1{w_r.v >= 0}; converges to K0(<u,v>).
double finite_width_kernel_estimate(const Matrix& w, const Vector& u, const Vector& v);

/// v_R(W, u) = (1/m) sum_r 1{|w_r.u| <= R}.
double finite_width_band_estimate(const Matrix& w, const Vector& u, double band);

struct WidthEstimate {
  int m = 0;
  double sup_error = 0.0;
  int probe_count = 0;
};

/// sup over all probe pairs (u_i, u_j) of |h(W, u_i, u_j) - K0(<u_i, u_j>)|.
WidthEstimate sup_kernel_error(const Matrix& w, const PointSet& probes);

/// Band statistics over a probe set.
struct BandEstimate {
  double mean = 0.0;             // mean over probes of v_R
  double sup_vs_linear = 0.0;    // sup |v_R - 2R/(sqrt(2 pi) kappa)|
  double sup_vs_exact = 0.0;     // sup |v_R - erf(R / (sqrt(2) kappa))|
};

BandEstimate band_statistics(const Matrix& w, const PointSet& probes, double band, double kappa);

}  // namespace gdp::ntk
