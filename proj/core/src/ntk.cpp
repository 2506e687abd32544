#include "gdp/ntk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gdp/error.hpp"

namespace gdp::ntk {

namespace {

constexpr double kInnerProductSlack = 1e-9;

double clamp_inner(double t) {
  if (!(std::abs(t) <= 1.0 + kInnerProductSlack)) {
    throw Error(Errc::NotOnSphere, "inner product " + std::to_string(t) + " outside [-1, 1]");
  }
  return std::clamp(t, -1.0, 1.0);
}

void require_degree(int degree) {
  if (degree < 0) throw Error(Errc::InvalidArgument, "degree must be >= 0");
}

}  // namespace

std::string_view to_string(KernelProfile p) noexcept {
  switch (p) {
    case KernelProfile::K0: return "K0";
    case KernelProfile::K1: return "K1";
    case KernelProfile::K: return "K";
    case KernelProfile::Step: return "STEP";
  }
  return "?";
}

double kernel_value(KernelProfile profile, double t) {
  t = clamp_inner(t);
  const double k0 = (std::numbers::pi - std::acos(t)) / (2.0 * std::numbers::pi);
  switch (profile) {
    case KernelProfile::K0: return k0;
    case KernelProfile::K1: return t * k0;
    case KernelProfile::K: return k0 * (1.0 + t);
    case KernelProfile::Step: return t >= 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double eigenvalue_quadrature(KernelProfile profile, int degree, const QuadratureRule& rule) {
  require_degree(degree);
  return rule.integrate([&](double t) {
    return kernel_value(profile, t) * harmonics::legendre_p(degree, rule.d, t);
  });
}

double s_closed_form(int k, SphereDim d) {
  require_degree(k);
  if (k == 0) return 0.5;
  if (k % 2 == 0) return 0.0;
  const int t = (k + 1) / 2;
  const double half_dm1 = 0.5 * (d.value() - 1);
  const double log_mag = std::log(harmonics::surface_ratio(d)) + (2.0 * t - 1) * std::log(0.5) +
                         std::lgamma(half_dm1) + std::lgamma(2.0 * t - 1) -
                         std::lgamma(static_cast<double>(t)) - std::lgamma(t + half_dm1);
  const double sign = (t % 2 == 1) ? 1.0 : -1.0;  // (-1)^{t-1}
  return sign * std::exp(log_mag);
}

double KernelSpectrum::mu_at(int degree) const {
  if (degree < 0 || degree > max_degree) {
    throw Error(Errc::InvalidArgument,
                "spectrum has degrees 0.." + std::to_string(max_degree) + ", asked for " +
                    std::to_string(degree));
  }
  return mu[degree];
}

KernelSpectrum spectrum_closed_form(SphereDim d, int max_degree) {
  require_degree(max_degree);
  const int dd = d.value();
  std::vector<double> lambda0(static_cast<std::size_t>(max_degree) + 2);
  for (int k = 0; k <= max_degree + 1; ++k) {
    const double s = s_closed_form(k, d);
    lambda0[k] = s * s;
  }
  KernelSpectrum out{d, max_degree, {}, {}, {}, SpectrumMethod::ClosedForm};
  out.lambda0.assign(lambda0.begin(), lambda0.end() - 1);
  out.lambda1.resize(max_degree + 1);
  out.mu.resize(max_degree + 1);
  for (int k = 0; k <= max_degree; ++k) {
    if (k == 0) {
      out.lambda1[0] = lambda0[1];
    } else {
      const double den = 2.0 * k + dd - 2;
      out.lambda1[k] = (k / den) * lambda0[k - 1] + ((k + dd - 2) / den) * lambda0[k + 1];
    }
    out.mu[k] = out.lambda0[k] + out.lambda1[k];
  }
  return out;
}

KernelSpectrum spectrum_quadrature(SphereDim d, int max_degree, const QuadratureRule& rule) {
  require_degree(max_degree);
  if (!(rule.d == d)) throw Error(Errc::DimensionMismatch, "quadrature rule built for another d");
  KernelSpectrum out{d, max_degree, {}, {}, {}, SpectrumMethod::Quadrature};
  out.mu.resize(max_degree + 1);
  out.lambda0.resize(max_degree + 1);
  out.lambda1.resize(max_degree + 1);
  for (int l = 0; l <= max_degree; ++l) {
    out.lambda0[l] = eigenvalue_quadrature(KernelProfile::K0, l, rule);
    out.lambda1[l] = eigenvalue_quadrature(KernelProfile::K1, l, rule);
    out.mu[l] = eigenvalue_quadrature(KernelProfile::K, l, rule);
  }
  return out;
}

KernelSpectrum spectrum_quadrature(SphereDim d, int max_degree) {
  return spectrum_quadrature(d, max_degree,
                             harmonics::make_angular_quadrature(d, kDefaultProfileNodes));
}

std::vector<double> extended_eigenvalues(const KernelSpectrum& spectrum, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (int l = 0; l <= spectrum.max_degree && out.size() < count; ++l) {
    const double n_l = std::exp(harmonics::log_harmonic_dim(spectrum.d, l));
    const std::size_t mult = static_cast<std::size_t>(std::llround(n_l));
    for (std::size_t j = 0; j < mult && out.size() < count; ++j) out.push_back(spectrum.mu[l]);
  }
  return out;
}

double finite_width_kernel_estimate(const Matrix& w, const Vector& u, const Vector& v) {
  if (w.cols() != u.size() || w.cols() != v.size()) {
    throw Error(Errc::DimensionMismatch, "weight rows and probe vectors differ in dimension");
  }
  if (w.rows() == 0) throw Error(Errc::InvalidArgument, "no weight samples");
  const Vector pu = w * u;
  const Vector pv = w * v;
  Eigen::Index hits = 0;
  for (Eigen::Index r = 0; r < w.rows(); ++r) hits += (pu[r] >= 0.0 && pv[r] >= 0.0) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(w.rows());
}

double finite_width_band_estimate(const Matrix& w, const Vector& u, double band) {
  if (band < 0.0) throw Error(Errc::InvalidArgument, "band half-width must be >= 0");
  if (w.cols() != u.size()) {
    throw Error(Errc::DimensionMismatch, "weight rows and probe vector differ in dimension");
  }
  if (w.rows() == 0) throw Error(Errc::InvalidArgument, "no weight samples");
  const Vector pu = w * u;
  Eigen::Index hits = 0;
  for (Eigen::Index r = 0; r < w.rows(); ++r) hits += std::abs(pu[r]) <= band ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(w.rows());
}

WidthEstimate sup_kernel_error(const Matrix& w, const PointSet& probes) {
  if (w.cols() != probes.cols()) {
    throw Error(Errc::DimensionMismatch, "weight rows and probes differ in dimension");
  }
  const Eigen::Index m = w.rows();
  const Eigen::Index p = probes.rows();
  // Active-indicator matrix, m x p, then h = A^T A / m for all pairs at once.
  const Matrix act = (w * probes.transpose()).unaryExpr([](double z) { return z >= 0.0 ? 1.0 : 0.0; });
  const Matrix h = (act.transpose() * act) / static_cast<double>(m);
  const Matrix gram = probes * probes.transpose();
  double sup = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) {
      sup = std::max(sup, std::abs(h(i, j) - kernel_value(KernelProfile::K0, gram(i, j))));
    }
  }
  return {static_cast<int>(m), sup, static_cast<int>(p)};
}

BandEstimate band_statistics(const Matrix& w, const PointSet& probes, double band, double kappa) {
  if (!(kappa > 0.0)) throw Error(Errc::InvalidArgument, "kappa must be positive");
  const double linear = 2.0 * band / (std::sqrt(2.0 * std::numbers::pi) * kappa);
  const double exact = std::erf(band / (std::sqrt(2.0) * kappa));
  BandEstimate out;
  for (Eigen::Index i = 0; i < probes.rows(); ++i) {
    const double v = finite_width_band_estimate(w, probes.row(i).transpose(), band);
    out.mean += v;
    out.sup_vs_linear = std::max(out.sup_vs_linear, std::abs(v - linear));
    out.sup_vs_exact = std::max(out.sup_vs_exact, std::abs(v - exact));
  }
  if (probes.rows() > 0) out.mean /= static_cast<double>(probes.rows());
  return out;
}

}  // namespace gdp::ntk
