#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "gdp/harmonics.hpp"
#include "gdp/netgdp.hpp"
#include "gdp/ntk.hpp"
#include "gdp/spectral.hpp"
#include "gdp/target.hpp"
#include "support.hpp"

using namespace gdp;
using harmonics::SphereDim;

namespace {

struct Problem {
  target::ZonalTarget target;
  target::TrainingSet ts;
  std::shared_ptr<const spectral::Eigensystem> eig;
};

Problem make_problem(int d, int n, double sigma0, std::uint64_t seed) {
  const auto spectrum = ntk::spectrum_closed_form(SphereDim(d), 4);
  Problem p{target::make_zonal_target(SphereDim(d), 1, {0.5, 0.3}, 5.0, spectrum, seed), {}, {}};
  p.ts = target::make_training_set(p.target, n, sigma0, seed + 1, seed + 2);
  p.eig = std::make_shared<const spectral::Eigensystem>(
      spectral::eigendecompose(spectral::build_gram(p.ts.features)));
  return p;
}

// Training loss (1/2n) |f(S) - y|^2 as a plain function of the weights.
double loss_of(const netgdp::NetworkState& net, const target::TrainingSet& ts) {
  return 0.5 * (netgdp::forward(net, ts.features) - ts.y).squaredNorm() / ts.n();
}

}  // namespace

TEST_CASE("symmetric initialization gives the zero function") {
  const auto net = netgdp::init_network(64, SphereDim(7), 1.3, 5);
  CHECK(net.m() == 64);
  CHECK(net.d() == 7);
  CHECK(net.w == net.w0);
  CHECK(net.w_aug.isZero(0.0));
  for (int p = 0; p < 32; ++p) {
    CHECK(net.w.row(2 * p) == net.w.row(2 * p + 1));
    CHECK(net.a[2 * p] == -net.a[2 * p + 1]);
    CHECK(std::abs(net.a[2 * p]) == 1.0);
  }
  const PointSet x = harmonics::sample_sphere(SphereDim(7), 50, 1);
  CHECK(netgdp::forward(net, x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("init_network error paths") {
  CHECK(test::code_of([] { netgdp::init_network(7, SphereDim(3), 1.0, 1); }) == Errc::OddWidth);
  CHECK(test::code_of([] { netgdp::init_network(0, SphereDim(3), 1.0, 1); }) ==
        Errc::InvalidArgument);
  CHECK(test::code_of([] { netgdp::init_network(4, SphereDim(3), 0.0, 1); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("forward matches a hand evaluation for m = 2") {
  netgdp::NetworkState net = netgdp::init_network(2, SphereDim(3), 1.0, 1);
  net.w << 1.0, 0.0, 0.0,  //
      0.0, -2.0, 0.0;
  net.w0 << 1.0, 0.0, 0.0,  //
      0.0, 1.0, 0.0;
  net.a << 1.0, -1.0;
  net.w_aug << 0.5, 0.25;
  PointSet x(2, 3);
  x << 0.6, -0.8, 0.0,  //
      -0.6, 0.8, 0.0;
  // Row 0: relu(0.6) - relu(1.6) + 0.5 * 1 + 0.25 * 0, all over sqrt 2.
  // Row 1: relu(-0.6) - relu(-1.6) + 0.5 * 0 + 0.25 * 1, all over sqrt 2.
  const Vector f = netgdp::forward(net, x);
  CHECK(f[0] == doctest::Approx((0.6 - 1.6 + 0.5) / std::sqrt(2.0)));
  CHECK(f[1] == doctest::Approx(0.25 / std::sqrt(2.0)));
}

TEST_CASE("full-rank GDP step equals a gradient step on the training loss") {
  const auto prob = make_problem(4, 12, 0.1, 3);
  netgdp::NetworkState net = netgdp::init_network(16, SphereDim(4), 1.0, 9);
  // Move away from the symmetric point so that every gradient term is active.
  net.w.array() += 0.05;
  net.w_aug.setConstant(0.1);
  const spectral::SpectralProjector identity(prob.eig, 12);
  const double eta = 0.3;
  const auto next = netgdp::gdp_step(net, prob.ts.features, prob.ts.y, identity, eta);

  const double h = 1e-6;
  for (int r = 0; r < 16; r += 5) {
    for (int c = 0; c < 4; ++c) {
      netgdp::NetworkState plus = net, minus = net;
      plus.w(r, c) += h;
      minus.w(r, c) -= h;
      const double grad = (loss_of(plus, prob.ts) - loss_of(minus, prob.ts)) / (2 * h);
      CHECK(next.w(r, c) == doctest::Approx(net.w(r, c) - eta * grad).epsilon(1e-7));
    }
    netgdp::NetworkState plus = net, minus = net;
    plus.w_aug[r] += h;
    minus.w_aug[r] -= h;
    const double grad = (loss_of(plus, prob.ts) - loss_of(minus, prob.ts)) / (2 * h);
    CHECK(next.w_aug[r] == doctest::Approx(net.w_aug[r] - eta * grad).epsilon(1e-7));
  }
  CHECK(next.w0 == net.w0);
  CHECK(next.a == net.a);
  CHECK(next.step == net.step + 1);
}

TEST_CASE("hand GDP step with n = 1 and m = 2") {
  netgdp::NetworkState net = netgdp::init_network(2, SphereDim(3), 1.0, 4);
  net.w << 0.0, 0.0, 1.0,  //
      0.0, 0.0, 1.0;
  net.w0 = net.w;
  net.a << 1.0, -1.0;
  PointSet x(1, 3);
  x << 0.0, 0.0, 1.0;
  const Vector y = Vector::Constant(1, 2.0);
  auto eig = std::make_shared<spectral::Eigensystem>();
  eig->u = Matrix::Identity(1, 1);
  eig->eigvals = Vector::Constant(1, 1.0);
  const spectral::SpectralProjector p(eig, 1);
  // u = 0 - 2 = -2; step = eta / sqrt 2 * 2 = sqrt 2 * eta on each active term.
  const auto next = netgdp::gdp_step(net, x, y, p, 0.5);
  const double s = 0.5 * 2.0 / std::sqrt(2.0);
  CHECK(next.w(0, 2) == doctest::Approx(1.0 + s));
  CHECK(next.w(1, 2) == doctest::Approx(1.0 - s));
  CHECK(next.w(0, 0) == 0.0);
  CHECK(next.w_aug[0] == doctest::Approx(s));
  CHECK(next.w_aug[1] == doctest::Approx(s));
  CHECK(netgdp::gdp_step(net, x, y, p, 0.0).w == net.w);
}

TEST_CASE("kernel_train follows the dense residual recursion") {
  const auto prob = make_problem(5, 40, 0.2, 11);
  const int n = 40, r = 6, steps = 25;
  const double eta = 0.5;
  const spectral::SpectralProjector p(prob.eig, r);
  netgdp::GdpConfig cfg{eta, steps, r, netgdp::Backend::KernelExact};
  const auto res = netgdp::kernel_train(prob.ts, p, cfg, true);
  REQUIRE(res.model.history.size() == steps + 1);

  const auto gram = spectral::build_gram(prob.ts.features);
  const Matrix step_matrix = Matrix::Identity(n, n) - eta * gram.kn * p.p();
  Vector u = -prob.ts.y;
  Vector alpha = Vector::Zero(n);
  for (int t = 0; t < steps; ++t) {
    CHECK((res.model.history[t] - u).cwiseAbs().maxCoeff() < 1e-12);
    alpha -= (eta / n) * (p.p() * u);
    u = step_matrix * u;
  }
  CHECK((res.model.u - u).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((res.model.alpha - alpha).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((gram.k * res.model.alpha - (prob.ts.y + res.model.u)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((res.model.predict(prob.ts.features) - (prob.ts.y + res.model.u)).cwiseAbs().maxCoeff() <
        1e-7);
  CHECK(res.trace.size() == steps + 1);
  CHECK(res.trace.loss[0] == doctest::Approx(0.5 * prob.ts.y.squaredNorm() / n));
  CHECK(res.trace.max_movement.empty());
  for (int t = 1; t <= steps; ++t) CHECK(res.trace.loss[t] <= res.trace.loss[t - 1] + 1e-15);
}

TEST_CASE("zero steps leave the model untouched") {
  const auto prob = make_problem(5, 20, 0.0, 2);
  const spectral::SpectralProjector p(prob.eig, 6);
  netgdp::GdpConfig cfg{0.5, 0, 6, netgdp::Backend::FiniteWidth};
  const auto net = netgdp::init_network(32, SphereDim(5), 1.0, 1);
  const auto res = netgdp::train(net, prob.ts, p, cfg);
  CHECK(res.net.w == net.w);
  CHECK(res.trace.size() == 1);
  CHECK((res.residual + prob.ts.y).cwiseAbs().maxCoeff() == 0.0);
  cfg.backend = netgdp::Backend::KernelExact;
  CHECK(netgdp::kernel_train(prob.ts, p, cfg).model.alpha.isZero(0.0));
}

TEST_CASE("finite-width training respects the movement bound and reduces the loss") {
  const auto prob = make_problem(5, 50, 0.0, 21);
  const spectral::SpectralProjector p(prob.eig, 6);
  const netgdp::GdpConfig cfg{0.5, 30, 6, netgdp::Backend::FiniteWidth};
  const auto res = netgdp::train(netgdp::init_network(512, SphereDim(5), 1.0, 3), prob.ts, p, cfg);
  REQUIRE(res.trace.size() == 31);
  CHECK(res.trace.max_movement[0] == 0.0);
  for (std::size_t t = 0; t < res.trace.size(); ++t) {
    CHECK(res.trace.max_movement[t] <= res.trace.r_bound[t] * (1 + 1e-12) + 1e-15);
  }
  CHECK(res.trace.loss.back() < res.trace.loss.front());
  CHECK(res.net.step == 30);
  const Vector u = netgdp::forward(res.net, prob.ts.features) - prob.ts.y;
  CHECK((res.residual - u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("training is deterministic") {
  const auto prob = make_problem(4, 30, 0.1, 8);
  const spectral::SpectralProjector p(prob.eig, 5);
  const netgdp::GdpConfig cfg{0.5, 10, 5, netgdp::Backend::FiniteWidth};
  const auto a = netgdp::train(netgdp::init_network(64, SphereDim(4), 1.0, 6), prob.ts, p, cfg);
  const auto b = netgdp::train(netgdp::init_network(64, SphereDim(4), 1.0, 6), prob.ts, p, cfg);
  CHECK(a.net.w == b.net.w);
  CHECK(a.net.w_aug == b.net.w_aug);
  CHECK(a.trace.loss == b.trace.loss);
}

TEST_CASE("non-finite labels raise NumericalDivergence") {
  auto prob = make_problem(4, 16, 0.0, 1);
  prob.ts.y[3] = std::numeric_limits<double>::quiet_NaN();
  const spectral::SpectralProjector p(prob.eig, 5);
  netgdp::GdpConfig cfg{0.5, 3, 5, netgdp::Backend::FiniteWidth};
  CHECK(test::code_of([&] {
          netgdp::train(netgdp::init_network(8, SphereDim(4), 1.0, 1), prob.ts, p, cfg);
        }) == Errc::NumericalDivergence);
}

TEST_CASE("configuration validation") {
  const auto prob = make_problem(4, 16, 0.0, 1);
  const spectral::SpectralProjector p(prob.eig, 5);
  const auto net = netgdp::init_network(8, SphereDim(4), 1.0, 1);
  CHECK(test::code_of([&] { netgdp::train(net, prob.ts, p, {1.0, 3, 5}); }) == Errc::InvalidArgument);
  CHECK(test::code_of([&] { netgdp::train(net, prob.ts, p, {0.5, -1, 5}); }) == Errc::InvalidArgument);
  CHECK(test::code_of([&] { netgdp::train(net, prob.ts, p, {0.5, 3, 17}); }) == Errc::RankOutOfRange);
  CHECK(test::code_of([&] { netgdp::train(net, prob.ts, p, {0.5, 3, 4}); }) == Errc::InvalidArgument);
  const auto wrong_d = netgdp::init_network(8, SphereDim(5), 1.0, 1);
  CHECK(test::code_of([&] { netgdp::train(wrong_d, prob.ts, p, {0.5, 3, 5}); }) ==
        Errc::DimensionMismatch);
}

TEST_CASE("population risk of the zero model is the target energy") {
  const auto prob = make_problem(5, 10, 0.0, 4);
  const auto net = netgdp::init_network(8, SphereDim(5), 1.0, 1);
  const auto risk = netgdp::population_risk(net, prob.target, 40000, 12);
  CHECK(risk.samples == 40000);
  CHECK(std::abs(risk.mean - prob.target.l2_norm_sq()) < 4 * risk.se + 1e-12);
  CHECK(risk.se > 0.0);
  const auto again = netgdp::population_risk(net, prob.target, 40000, 12);
  CHECK(again.mean == risk.mean);
  CHECK(test::code_of([&] { netgdp::population_risk(net, prob.target, 999, 12); }) ==
        Errc::InvalidArgument);
}
