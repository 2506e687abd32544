#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gdp/harmonics.hpp"
#include "gdp/ntk.hpp"
#include "gdp/select.hpp"
#include "gdp/spectral.hpp"
#include "gdp/target.hpp"
#include "support.hpp"

using namespace gdp;
using harmonics::SphereDim;

namespace {

target::TrainingSet data_for(int d, int k0, std::vector<double> energies, int n, double sigma0,
                             std::uint64_t seed) {
  const auto spectrum = ntk::spectrum_closed_form(SphereDim(d), 6);
  const auto t = target::make_zonal_target(SphereDim(d), k0, energies, 1e3, spectrum, seed);
  return target::make_training_set(t, n, sigma0, seed + 1, seed + 2);
}

}  // namespace

TEST_CASE("negative start degree gives an empty report and a header-only table") {
  const auto ts = data_for(5, 1, {0.5, 0.5}, 30, 0.0, 1);
  const auto spectrum = ntk::spectrum_closed_form(SphereDim(5), 4);
  const auto rep = select::select_degree(ts, spectrum, -1, 2.0);
  CHECK_FALSE(rep.chosen_degree);
  CHECK(rep.per_level.empty());
  std::ostringstream os;
  select::loss_ratio_table(rep, os);
  CHECK(os.str() == "ell,r,T_ell,E_ell,mu_next,ratio,lower_hit,upper_hit\n");
}

TEST_CASE("selection error paths") {
  const auto ts = data_for(5, 1, {0.5, 0.5}, 40, 0.0, 1);
  const auto spectrum = ntk::spectrum_closed_form(SphereDim(5), 6);
  // m_3 = 1 + 5 + 14 + 30 = 50 > 40.
  CHECK(test::code_of([&] { select::select_degree(ts, spectrum, 3, 2.0); }) ==
        Errc::StartDegreeTooLarge);
  const auto short_spectrum = ntk::spectrum_closed_form(SphereDim(5), 2);
  CHECK(test::code_of([&] { select::select_degree(ts, short_spectrum, 2, 2.0); }) ==
        Errc::InvalidArgument);
  const auto other_d = ntk::spectrum_closed_form(SphereDim(6), 6);
  CHECK(test::code_of([&] { select::select_degree(ts, other_d, 1, 2.0); }) ==
        Errc::DimensionMismatch);
  CHECK(test::code_of([&] { select::select_degree(ts, spectrum, 1, 0.0); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("per-level records follow the documented arithmetic") {
  const int n = 200, d = 5;
  const auto ts = data_for(d, 1, {0.6, 0.4}, n, 0.2, 3);
  const auto spectrum = ntk::spectrum_closed_form(SphereDim(d), 6);
  select::SelectOptions opts;
  opts.step_scale = 4.0;
  const auto rep = select::select_degree(ts, spectrum, 2, 1e4, opts);
  CHECK(rep.thresholds.lower == doctest::Approx(2.5e7));
  CHECK(rep.thresholds.upper == doctest::Approx(1.25e7));
  CHECK_FALSE(rep.chosen_degree);
  REQUIRE(rep.per_level.size() == 4);  // levels 2, 1, 0, -1
  const int expected_r[] = {20, 6, 1, 0};
  for (std::size_t i = 0; i < rep.per_level.size(); ++i) {
    const auto& rec = rep.per_level[i];
    CHECK(rec.ell == 2 - static_cast<int>(i));
    CHECK(rec.r == static_cast<std::uint64_t>(expected_r[i]));
    CHECK(rec.mu_next == spectrum.mu[rec.ell + 1]);
    CHECK(rec.ratio == rec.loss / rec.mu_next);
    CHECK(rec.lower_hit == (rec.ratio >= rep.thresholds.lower));
    CHECK(rec.upper_hit == (rec.ratio <= rep.thresholds.upper));
    if (rec.ell >= 0) {
      CHECK(rec.steps == std::max(1, static_cast<int>(std::lround(4.0 * n / std::pow(d, rec.ell)))));
    }
  }
  // Debiased zero-model loss: |y|^2 / n - sigma0^2.
  CHECK(rep.per_level.back().loss == doctest::Approx(ts.y.squaredNorm() / n - 0.04));
}

TEST_CASE("a constant target selects degree 0") {
  const int d = 5;
  const auto spectrum = ntk::spectrum_closed_form(SphereDim(d), 6);
  const double beta0 = 2.0;
  const auto ts = data_for(d, 0, {3.0 * beta0 * std::sqrt(spectrum.mu[0])}, 400, 0.0, 7);
  select::SelectOptions opts;
  opts.loss_mode = select::LossMode::Clean;
  const auto rep = select::select_degree(ts, spectrum, 2, beta0, opts);
  REQUIRE(rep.chosen_degree);
  CHECK(*rep.chosen_degree == 0);
  CHECK(*rep.triggered_level == -1);
}

TEST_CASE("a degree-1 target with strong energies selects degree 1") {
  const int d = 5;
  const auto spectrum = ntk::spectrum_closed_form(SphereDim(d), 6);
  const double beta0 = 2.0;
  const std::vector<double> c = {3.0 * beta0 * std::sqrt(spectrum.mu[0]),
                                 3.0 * beta0 * std::sqrt(spectrum.mu[1])};
  const auto ts = data_for(d, 1, c, 1000, 0.0, 9);
  select::SelectOptions opts;
  opts.loss_mode = select::LossMode::Clean;
  const auto rep = select::select_degree(ts, spectrum, 3, beta0, opts);
  REQUIRE(rep.chosen_degree);
  CHECK(*rep.chosen_degree == 1);
}

TEST_CASE("selection is deterministic and reuses a supplied eigensystem") {
  const auto ts = data_for(4, 1, {0.5, 0.5}, 120, 0.1, 5);
  const auto spectrum = ntk::spectrum_closed_form(SphereDim(4), 6);
  select::SelectOptions opts;
  const auto a = select::select_degree(ts, spectrum, 2, 2.0, opts);
  opts.eigensystem = std::make_shared<const spectral::Eigensystem>(
      spectral::eigendecompose(spectral::build_gram(ts.features)));
  const auto b = select::select_degree(ts, spectrum, 2, 2.0, opts);
  std::ostringstream sa, sb;
  select::loss_ratio_table(a, sa);
  select::loss_ratio_table(b, sb);
  CHECK(sa.str() == sb.str());
  CHECK(a.chosen_degree == b.chosen_degree);
}
