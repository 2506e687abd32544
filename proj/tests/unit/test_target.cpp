#include <doctest.h>

#include <cmath>

#include "gdp/harmonics.hpp"
#include "gdp/ntk.hpp"
#include "gdp/target.hpp"
#include "support.hpp"

using namespace gdp;
using harmonics::SphereDim;

namespace {

const ntk::KernelSpectrum& spectrum6() {
  static const auto s = ntk::spectrum_closed_form(SphereDim(6), 6);
  return s;
}

double mc_energy(const target::ZonalTarget& t, int degree, std::uint64_t seed) {
  const PointSet x = harmonics::sample_sphere(t.d, 200000, seed);
  const Vector f = degree < 0 ? target::evaluate_target(t, x) : target::evaluate_degree(t, degree, x);
  return f.squaredNorm() / static_cast<double>(x.rows());
}

}  // namespace

TEST_CASE("single-pole target: value at the pole and norms") {
  const auto t = target::make_zonal_target(SphereDim(6), 2, {0.3, 0.2, 0.1}, 5.0, spectrum6(), 4);
  REQUIRE(t.components.size() == 3);
  CHECK(t.l2_norm_sq() == doctest::Approx(0.09 + 0.04 + 0.01));
  const auto& s = spectrum6();
  CHECK(t.rkhs_norm_sq() == doctest::Approx(0.09 / s.mu[0] + 0.04 / s.mu[1] + 0.01 / s.mu[2]));
  // At x = pole of the degree-2 term, that term equals c sqrt(N(6, 2)) = 0.1 sqrt(20).
  const auto& c2 = t.components[2];
  PointSet x(1, 6);
  x.row(0) = c2.pole.transpose();
  CHECK(target::evaluate_degree(t, 2, x)[0] == doctest::Approx(0.1 * std::sqrt(20.0)));
  CHECK(std::abs(target::evaluate_target(t, x)[0]) <= t.sup_bound() + 1e-12);
}

TEST_CASE("Monte Carlo degree energies match c_l^2") {
  const auto t = target::make_zonal_target(SphereDim(6), 2, {0.3, 0.2, 0.1}, 5.0, spectrum6(), 4);
  CHECK(mc_energy(t, 0, 1) == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(mc_energy(t, 1, 2) == doctest::Approx(0.04).epsilon(0.03));
  CHECK(mc_energy(t, 2, 3) == doctest::Approx(0.01).epsilon(0.05));
  CHECK(mc_energy(t, -1, 5) == doctest::Approx(0.14).epsilon(0.03));
}

TEST_CASE("multi-pole target keeps the requested degree energy") {
  target::ZonalOptions opts;
  opts.poles_per_degree = 4;
  const auto t = target::make_zonal_target(SphereDim(6), 1, {0.0, 0.5}, 5.0, spectrum6(), 8, opts);
  CHECK(t.components.size() == 4);
  CHECK(mc_energy(t, 1, 6) == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("target construction errors") {
  const auto& s = spectrum6();
  CHECK(test::code_of([&] { target::make_zonal_target(SphereDim(6), 1, {1.0, 1.0}, 0.5, s, 1); }) ==
        Errc::NormBudgetExceeded);
  CHECK(test::code_of([&] { target::make_zonal_target(SphereDim(6), 1, {1.0, 0.0}, 9.0, s, 1); }) ==
        Errc::InvalidArgument);
  CHECK(test::code_of([&] { target::make_zonal_target(SphereDim(6), 1, {1.0}, 9.0, s, 1); }) ==
        Errc::InvalidArgument);
  CHECK(test::code_of([&] { target::make_zonal_target(SphereDim(5), 1, {0.1, 0.1}, 9.0, s, 1); }) ==
        Errc::InvalidArgument);
  CHECK(test::code_of([&] { target::make_zonal_target(SphereDim(6), 7, std::vector<double>(8, 0.1), 99.0, s, 1); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("RKHS budget is inclusive at equality") {
  const auto& s = spectrum6();
  const double c1 = 0.1;
  const double gamma0 = c1 / std::sqrt(s.mu[1]);
  CHECK_NOTHROW(target::make_zonal_target(SphereDim(6), 1, {0.0, c1}, gamma0, s, 1));
}

TEST_CASE("training set: labels, noise level and independent streams") {
  const auto t = target::make_zonal_target(SphereDim(6), 1, {0.3, 0.2}, 5.0, spectrum6(), 4);
  const auto clean = target::make_training_set(t, 5000, 0.0, 10, 20);
  CHECK(clean.n() == 5000);
  CHECK(clean.y == clean.f_star);
  const auto noisy = target::make_training_set(t, 5000, 0.5, 10, 20);
  CHECK(noisy.features == clean.features);
  const Vector eps = noisy.y - noisy.f_star;
  CHECK(eps.mean() == doctest::Approx(0.0).scale(1.0).epsilon(0.03));
  CHECK(std::sqrt(eps.squaredNorm() / 5000) == doctest::Approx(0.5).epsilon(0.03));
  const auto other_noise = target::make_training_set(t, 5000, 0.5, 10, 21);
  CHECK(other_noise.features == noisy.features);
  CHECK(other_noise.y != noisy.y);
  const auto other_data = target::make_training_set(t, 5000, 0.5, 11, 20);
  CHECK(other_data.features != noisy.features);
  CHECK(((other_data.y - other_data.f_star) - eps).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("degree_energy_condition") {
  const auto& s = spectrum6();
  const double beta0 = 2.0;
  std::vector<double> c = {beta0 * std::sqrt(s.mu[0]), beta0 * std::sqrt(s.mu[1])};
  const auto exact = target::make_zonal_target(SphereDim(6), 1, c, 10.0, s, 1);
  CHECK(target::degree_energy_condition(exact, beta0));
  CHECK_FALSE(target::degree_energy_condition(exact, beta0 * 1.001));
  c[0] *= 0.9;
  const auto weak = target::make_zonal_target(SphereDim(6), 1, c, 10.0, s, 1);
  CHECK_FALSE(target::degree_energy_condition(weak, beta0));
}
