#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gdp/harness.hpp"
#include "support.hpp"

using namespace gdp;

namespace {

config::RunConfig small_config() {
  config::RunConfig c;
  c.d = 5;
  c.k0 = 1;
  c.n = 120;
  c.m = 64;
  c.sigma0 = 0.1;
  c.n_mc = 2000;
  return c;
}

}  // namespace

TEST_CASE("log-log fit recovers an exact power law") {
  const std::vector<double> x = {100, 200, 400, 800, 1600};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 / v);
  const auto fit = harness::fit_loglog_slope(x, y);
  CHECK(std::abs(fit.slope + 1.0) < 1e-10);
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0));
  CHECK(test::code_of([] { harness::fit_loglog_slope({1.0}, {1.0}); }) == Errc::InvalidArgument);
  CHECK(test::code_of([] { harness::fit_loglog_slope({1.0, 2.0}, {1.0, -1.0}); }) ==
        Errc::InvalidArgument);
  CHECK(test::code_of([] { harness::fit_loglog_slope({2.0, 2.0}, {1.0, 3.0}); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("rate sweep rejects short or unsorted grids") {
  const auto c = small_config();
  CHECK(test::code_of([&] { harness::rate_sweep(c, {500}, 1); }) == Errc::InvalidArgument);
  CHECK(test::code_of([&] { harness::rate_sweep(c, {100, 200, 200, 400}, 1); }) ==
        Errc::InvalidArgument);
  CHECK(test::code_of([&] { harness::rate_sweep(c, {100, 200, 300, 400}, 0); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("replicate seeds keep the poles and separate every other stream") {
  const SeedStreams base{1, 2, 3, 4, 5};
  std::set<std::uint64_t> seen;
  for (int n : {100, 200}) {
    for (int i = 0; i < 5; ++i) {
      const auto s = harness::replicate_seeds(base, n, i);
      CHECK(s.poles == base.poles);
      seen.insert(s.data);
      seen.insert(s.init);
      seen.insert(s.noise);
      seen.insert(s.mc);
    }
  }
  CHECK(seen.size() == 40);
  CHECK(harness::replicate_seeds(base, 100, 3) == harness::replicate_seeds(base, 100, 3));
}

TEST_CASE("parallel_for covers every index and rethrows the first failure") {
  std::vector<std::atomic<int>> hits(50);
  harness::parallel_for(50, 4, [&](int i) { hits[i].fetch_add(1); });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(harness::parallel_for(20, 3,
                                        [](int i) {
                                          if (i == 7) throw Error(Errc::Io, "boom");
                                        }),
                  Error);
  CHECK_THROWS_AS(harness::parallel_for(5, 1, [](int) { throw std::runtime_error("x"); }),
                  std::runtime_error);
  harness::parallel_for(0, 4, [](int) { FAIL("no task expected"); });
  CHECK(harness::resolve_jobs(3) == 3);
  CHECK(harness::resolve_jobs(0) >= 1);
}

TEST_CASE("run_one with the kernel backend") {
  const auto c = small_config();
  const auto rec = harness::run_one(c);
  CHECK(rec.steps == 24);
  CHECK(rec.rank == 6);
  CHECK(rec.reference == doctest::Approx(5.0 / 120));
  CHECK(rec.loss_final == rec.final_train_loss);
  CHECK(rec.loss_final <= rec.loss_half);
  CHECK(rec.loss_half <= rec.loss_quarter);
  CHECK(rec.risk_mean > 0.0);
  CHECK(rec.risk_se > 0.0);
  CHECK(rec.max_movement == 0.0);
  CHECK(rec.config_hash == config::hash_hex(config::config_hash(c)));
  const auto again = harness::run_one(c);
  CHECK(again.risk_mean == rec.risk_mean);
}

TEST_CASE("run_one with the finite-width backend records the movement bound") {
  auto c = small_config();
  c.backend = netgdp::Backend::FiniteWidth;
  const auto rec = harness::run_one(c);
  CHECK(rec.max_movement > 0.0);
  CHECK(rec.max_movement <= rec.r_bound);
}

TEST_CASE("projection beats plain gradient descent on a noisy low-degree target") {
  auto c = small_config();
  c.n = 300;
  c.sigma0 = 0.5;
  c.n_mc = 20000;
  const auto gdp = harness::run_one(c);
  const auto vanilla = harness::run_vanilla(c);
  CHECK(vanilla.rank == 300);
  CHECK(vanilla.final_train_loss < gdp.final_train_loss);
  CHECK(gdp.risk_mean < vanilla.risk_mean);
}

TEST_CASE("errors carry the config hash") {
  auto c = small_config();
  c.rank = 500;
  try {
    harness::run_one(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Config);
    CHECK(std::string(e.what()).find(config::hash_hex(config::config_hash(c))) != std::string::npos);
  }
}

TEST_CASE("records table has one row per record and a stable header") {
  const auto rec = harness::run_one(small_config());
  const auto table = harness::records_table({rec, rec});
  CHECK(table.rows().size() == 2);
  CHECK(table.columns().front() == "config_hash");
  CHECK(table.columns().back() == "wall_seconds");
}

TEST_CASE("uniform convergence audit: shapes and ranges") {
  const auto res = harness::uniform_convergence_audit(4, {16, 64}, 6, 2, 1.0, {0.1, 0.3},
                                                      SeedStreams{}, 2);
  CHECK(res.kernel_table.rows().size() == 4);
  CHECK(res.band_table.rows().size() == 8);
  REQUIRE(res.mean_sup_error.size() == 2);
  for (double e : res.mean_sup_error) {
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
  }
  for (const auto& row : res.band_table.rows()) {
    const double v = std::get<double>(row[3]);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const auto serial = harness::uniform_convergence_audit(4, {16, 64}, 6, 2, 1.0, {0.1, 0.3},
                                                         SeedStreams{}, 1);
  std::ostringstream a, b;
  res.kernel_table.write_csv(a);
  serial.kernel_table.write_csv(b);
  CHECK(a.str() == b.str());
  CHECK(test::code_of([] {
          harness::uniform_convergence_audit(4, {64, 16}, 6, 2, 1.0, {}, SeedStreams{}, 1);
        }) == Errc::InvalidArgument);
}

TEST_CASE("run_selection uses the select section") {
  auto c = small_config();
  c.n = 200;
  c.select.start_degree = 2;
  const auto rep = harness::run_selection(c);
  CHECK(rep.thresholds.beta0 == c.select.beta0);
  CHECK_FALSE(rep.per_level.empty());
  CHECK(rep.per_level.front().ell == 2);
}

TEST_CASE("records table column order is fixed") {
  std::ostringstream os;
  harness::records_table({}).write_csv(os);
  CHECK(os.str() ==
        "config_hash,backend,d,k0,n,m,eta,T,r,sigma0,seed_data,seed_init,seed_noise,seed_mc,"
        "seed_poles,final_train_loss,risk_mean,risk_se,reference,loss_T4,loss_T2,loss_T,"
        "max_movement,r_bound,wall_seconds\n");
}

TEST_CASE("large derived seeds are written unsigned") {
  auto rec = harness::run_one(small_config());
  rec.config.seeds.data = 0xffffffffffffffffULL;
  std::ostringstream os;
  harness::records_table({rec}).write_csv(os);
  CHECK(os.str().find(",18446744073709551615,") != std::string::npos);
}

TEST_CASE("changing one seed stream leaves the others' artifacts untouched") {
  const auto base_cfg = small_config();
  const auto base = harness::run_one(base_cfg);

  auto mc = base_cfg;
  mc.seeds.mc += 100;
  const auto r_mc = harness::run_one(mc);
  CHECK(r_mc.final_train_loss == base.final_train_loss);
  CHECK(r_mc.loss_quarter == base.loss_quarter);
  CHECK(r_mc.risk_mean != base.risk_mean);

  auto init = base_cfg;
  init.seeds.init += 100;  // the kernel backend has no initialization
  const auto r_init = harness::run_one(init);
  CHECK(r_init.final_train_loss == base.final_train_loss);
  CHECK(r_init.risk_mean == base.risk_mean);

  auto noise = base_cfg;
  noise.seeds.noise += 100;
  const auto t0 = harness::build_target(base_cfg);
  const auto ts0 = harness::build_training_set(base_cfg, t0);
  const auto ts1 = harness::build_training_set(noise, harness::build_target(noise));
  CHECK(ts1.features == ts0.features);
  CHECK(ts1.f_star == ts0.f_star);
  CHECK(ts1.y != ts0.y);
}
