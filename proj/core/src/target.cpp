#include "gdp/target.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gdp/error.hpp"
#include "gdp/random.hpp"

namespace gdp::target {

double ZonalTarget::rkhs_norm_sq() const {
  double acc = 0.0;
  for (int l = 0; l <= k0; ++l) {
    if (degree_energy[l] > 0.0) acc += degree_energy[l] / spectrum.mu_at(l);
  }
  return acc;
}

double ZonalTarget::l2_norm_sq() const {
  double acc = 0.0;
  for (double e : degree_energy) acc += e;
  return acc;
}

double ZonalTarget::sup_bound() const {
  double acc = 0.0;
  for (const auto& c : components) {
    acc += std::abs(c.coeff) * std::sqrt(static_cast<double>(harmonics::harmonic_dim(d, c.degree)));
  }
  return acc;
}

ZonalTarget make_zonal_target(SphereDim d, int k0, const std::vector<double>& energies,
                              double gamma0, const ntk::KernelSpectrum& spectrum,
                              std::uint64_t pole_seed, ZonalOptions opts) {
  if (k0 < 0) throw Error(Errc::InvalidArgument, "k0 must be >= 0");
  if (static_cast<int>(energies.size()) != k0 + 1) {
    throw Error(Errc::InvalidArgument, "expected " + std::to_string(k0 + 1) +
                                           " degree energies, got " +
                                           std::to_string(energies.size()));
  }
  if (!(spectrum.d == d) || spectrum.max_degree < k0) {
    throw Error(Errc::InvalidArgument, "spectrum does not cover the target degrees");
  }
  if (opts.poles_per_degree < 1) throw Error(Errc::InvalidArgument, "poles_per_degree must be >= 1");
  for (double c : energies) {
    if (!(c >= 0.0)) throw Error(Errc::InvalidArgument, "degree energies must be >= 0");
  }
  if (!(energies[k0] > 0.0)) {
    throw Error(Errc::InvalidArgument, "the top degree k0 must carry positive energy");
  }
  if (!(gamma0 > 0.0)) throw Error(Errc::InvalidArgument, "gamma0 must be positive");

  ZonalTarget t{d, k0, {}, std::vector<double>(k0 + 1), spectrum, gamma0};
  for (int l = 0; l <= k0; ++l) t.degree_energy[l] = energies[l] * energies[l];
  const double norm_sq = t.rkhs_norm_sq();
  if (norm_sq > gamma0 * gamma0 * (1.0 + 1e-12)) {
    throw Error(Errc::NormBudgetExceeded, "RKHS norm^2 " + std::to_string(norm_sq) +
                                              " exceeds gamma0^2 = " +
                                              std::to_string(gamma0 * gamma0));
  }

  Rng rng = make_rng(pole_seed);
  const int q = opts.poles_per_degree;
  for (int l = 0; l <= k0; ++l) {
    if (energies[l] == 0.0) continue;
    const PointSet poles = harmonics::sample_sphere(d, q, rng);
    double coeff = energies[l];
    if (q > 1) {
      // Energy of sum_j b sqrt(N) P_l(<x, w_j>) is b^2 * 1^T G 1 with
      // G_ij = P_l(<w_i, w_j>) (addition formula).
      double gram_sum = 0.0;
      for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
          gram_sum += harmonics::legendre_p(l, d, std::clamp(poles.row(i).dot(poles.row(j)), -1.0, 1.0));
        }
      }
      if (!(gram_sum > 1e-12)) {
        throw Error(Errc::InvalidArgument, "degenerate pole configuration for degree " +
                                               std::to_string(l));
      }
      coeff = energies[l] / std::sqrt(gram_sum);
    }
    for (int j = 0; j < q; ++j) {
      t.components.push_back({l, poles.row(j).transpose(), coeff});
    }
  }
  return t;
}

Vector evaluate_degree(const ZonalTarget& t, int degree, const PointSet& x) {
  harmonics::require_on_sphere(x);
  if (x.cols() != t.d.value()) throw Error(Errc::DimensionMismatch, "points have the wrong dimension");
  Vector out = Vector::Zero(x.rows());
  for (const auto& c : t.components) {
    if (degree >= 0 && c.degree != degree) continue;
    const double scale =
        c.coeff * std::sqrt(static_cast<double>(harmonics::harmonic_dim(t.d, c.degree)));
    const Vector proj = x * c.pole;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out[i] += scale * harmonics::legendre_p(c.degree, t.d, std::clamp(proj[i], -1.0, 1.0));
    }
  }
  return out;
}

Vector evaluate_target(const ZonalTarget& t, const PointSet& x) { return evaluate_degree(t, -1, x); }

TrainingSet make_training_set(const ZonalTarget& t, int n, double sigma0, std::uint64_t data_seed,
                              std::uint64_t noise_seed) {
  if (n < 1) throw Error(Errc::InvalidArgument, "training set needs n >= 1");
  if (!(sigma0 >= 0.0)) throw Error(Errc::InvalidArgument, "sigma0 must be >= 0");
  TrainingSet ts;
  ts.features = harmonics::sample_sphere(t.d, n, data_seed);
  ts.f_star = evaluate_target(t, ts.features);
  ts.y = ts.f_star;
  ts.sigma0 = sigma0;
  ts.data_seed = data_seed;
  ts.noise_seed = noise_seed;
  if (sigma0 > 0.0) {
    Rng rng = make_rng(noise_seed);
    std::normal_distribution<double> noise(0.0, sigma0);
    for (int i = 0; i < n; ++i) ts.y[i] += noise(rng);
  }
  return ts;
}

bool degree_energy_condition(const ZonalTarget& t, double beta0) {
  if (beta0 < 0.0) throw Error(Errc::InvalidArgument, "beta0 must be >= 0");
  if (t.spectrum.max_degree < t.k0 + 1) {
    throw Error(Errc::InvalidArgument, "spectrum must cover degree k0 + 1");
  }
  for (int l = 0; l <= t.k0; ++l) {
    const double need = beta0 * beta0 * t.spectrum.mu_at(l);
    // Relative slack so that c_l = beta0 sqrt(mu_l) counts as satisfied.
    if (t.degree_energy[l] < need * (1.0 - 1e-12)) return false;
  }
  return true;
}

}  // namespace gdp::target
