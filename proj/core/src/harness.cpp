#include "gdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "gdp/error.hpp"
#include "gdp/harmonics.hpp"
#include "gdp/ntk.hpp"
#include "gdp/random.hpp"
#include "gdp/spectral.hpp"

namespace gdp::harness {

namespace {

int spectrum_degree(const config::RunConfig& cfg) {
  return std::max(cfg.k0, cfg.select.start_degree) + 2;
}

// Error::what() is "<code>: <message>"; keep only the message part.
std::string message_of(const Error& e) {
  const std::string what = e.what();
  const auto pos = what.find(": ");
  return pos == std::string::npos ? what : what.substr(pos + 2);
}

double loss_at(const netgdp::TrainTrace& trace, int t) {
  return trace.loss.at(static_cast<std::size_t>(t));
}

}  // namespace

std::vector<double> resolved_energies(const config::RunConfig& cfg,
                                      const ntk::KernelSpectrum& spectrum) {
  if (!cfg.degree_energies.empty()) return cfg.degree_energies;
  std::vector<double> c(cfg.k0 + 1);
  for (int l = 0; l <= cfg.k0; ++l) c[l] = cfg.gamma0 * std::sqrt(spectrum.mu_at(l) / (cfg.k0 + 1));
  return c;
}

target::ZonalTarget build_target(const config::RunConfig& cfg) {
  const harmonics::SphereDim d(cfg.d);
  const auto spectrum = ntk::spectrum_closed_form(d, spectrum_degree(cfg));
  return target::make_zonal_target(d, cfg.k0, resolved_energies(cfg, spectrum), cfg.gamma0,
                                   spectrum, cfg.seeds.poles);
}

target::TrainingSet build_training_set(const config::RunConfig& cfg,
                                       const target::ZonalTarget& t) {
  return target::make_training_set(t, cfg.n, cfg.sigma0, cfg.seeds.data, cfg.seeds.noise);
}

DetailedRun run_detailed(const config::RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  DetailedRun out;
  RunRecord& rec = out.record;
  rec.config = cfg;
  rec.config_hash = config::hash_hex(config::config_hash(cfg));
  try {
    cfg.validate();
    const auto t = build_target(cfg);
    const auto ts = build_training_set(cfg, t);
    auto eig = std::make_shared<const spectral::Eigensystem>(
        spectral::eigendecompose(spectral::build_gram(ts.features)));
    rec.rank = cfg.resolved_rank();
    rec.steps = cfg.resolved_steps();
    const spectral::SpectralProjector p(eig, rec.rank);
    const netgdp::GdpConfig gdp{cfg.eta, rec.steps, rec.rank, cfg.backend};

    netgdp::TrainTrace& trace = out.trace;
    netgdp::RiskEstimate risk;
    if (cfg.backend == netgdp::Backend::KernelExact) {
      auto res = netgdp::kernel_train(ts, p, gdp);
      risk = netgdp::population_risk(res.model, t, cfg.n_mc, cfg.seeds.mc);
      trace = std::move(res.trace);
    } else {
      auto net = netgdp::init_network(cfg.m, t.d, cfg.kappa, cfg.seeds.init);
      auto res = netgdp::train(std::move(net), ts, p, gdp);
      risk = netgdp::population_risk(res.net, t, cfg.n_mc, cfg.seeds.mc);
      trace = std::move(res.trace);
      rec.max_movement = *std::max_element(trace.max_movement.begin(), trace.max_movement.end());
      rec.r_bound = trace.r_bound.back();
      out.net = std::move(res.net);
    }
    rec.final_train_loss = trace.loss.back();
    rec.loss_quarter = loss_at(trace, rec.steps / 4);
    rec.loss_half = loss_at(trace, rec.steps / 2);
    rec.loss_final = loss_at(trace, rec.steps);
    rec.risk_mean = risk.mean;
    rec.risk_se = risk.se;
    rec.reference = std::pow(static_cast<double>(cfg.d), cfg.k0) / cfg.n;
  } catch (const Error& e) {
    throw Error(e.code(), message_of(e) + " [config " + rec.config_hash + "]");
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RunRecord run_one(const config::RunConfig& cfg) { return run_detailed(cfg).record; }

emit::Table trace_table(const netgdp::TrainTrace& trace) {
  emit::Table table({"t", "loss", "residual_norm", "max_movement", "r_bound"});
  const bool finite = !trace.max_movement.empty();
  for (std::size_t t = 0; t < trace.size(); ++t) {
    table.add_row({static_cast<std::int64_t>(t), trace.loss[t], trace.residual_norm[t],
                   finite ? emit::Cell(trace.max_movement[t]) : emit::Cell(std::string()),
                   finite ? emit::Cell(trace.r_bound[t]) : emit::Cell(std::string())});
  }
  return table;
}

RunRecord run_vanilla(config::RunConfig cfg) {
  cfg.rank = cfg.n;
  return run_one(cfg);
}

emit::Table records_table(const std::vector<RunRecord>& records) {
  emit::Table table({"config_hash", "backend", "d", "k0", "n", "m", "eta", "T", "r", "sigma0",
                     "seed_data", "seed_init", "seed_noise", "seed_mc", "seed_poles",
                     "final_train_loss", "risk_mean", "risk_se", "reference", "loss_T4",
                     "loss_T2", "loss_T", "max_movement", "r_bound", "wall_seconds"});
  for (const auto& r : records) {
    const auto& c = r.config;
    table.add_row({r.config_hash, config::to_string(c.backend), c.d, c.k0, c.n, c.m, c.eta,
                   r.steps, r.rank, c.sigma0, c.seeds.data, c.seeds.init, c.seeds.noise,
                   c.seeds.mc, c.seeds.poles, r.final_train_loss, r.risk_mean, r.risk_se, r.reference, r.loss_quarter, r.loss_half, r.loss_final,
                   r.max_movement, r.r_bound, r.wall_seconds});
  }
  return table;
}

LogLogFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(Errc::InvalidArgument, "log-log fit needs two equally long series of length >= 2");
  }
  const std::size_t k = x.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(Errc::InvalidArgument, "log-log fit needs positive values");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::InvalidArgument, "log-log fit needs distinct x values");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

emit::Table SweepResult::points_table() const {
  emit::Table table({"n", "mean_risk", "se", "reference", "fitted_slope"});
  for (const auto& p : points) table.add_row({p.n, p.mean_risk, p.se, p.reference, fit.slope});
  return table;
}

SeedStreams replicate_seeds(const SeedStreams& base, int n, int index) {
  const auto salt = static_cast<std::uint64_t>(n);
  const auto i = static_cast<std::uint64_t>(index);
  SeedStreams s;
  s.data = derive_seed(base.data, salt, i);
  s.init = derive_seed(base.init, salt, i);
  s.noise = derive_seed(base.noise, salt, i);
  s.mc = derive_seed(base.mc, salt, i);
  s.poles = base.poles;
  return s;
}

SweepResult rate_sweep(const config::RunConfig& base, const std::vector<int>& n_grid,
                       int seeds_per_n, int jobs) {
  if (n_grid.size() < 4) throw Error(Errc::InvalidArgument, "rate sweep needs at least 4 sample sizes");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) {
      throw Error(Errc::InvalidArgument, "sample sizes must be strictly increasing");
    }
  }
  if (seeds_per_n < 1) throw Error(Errc::InvalidArgument, "seeds_per_n must be >= 1");

  const int per = seeds_per_n;
  const int total = static_cast<int>(n_grid.size()) * per;
  std::vector<config::RunConfig> configs(total, base);
  for (int i = 0; i < total; ++i) {
    configs[i].n = n_grid[i / per];
    configs[i].seeds = replicate_seeds(base.seeds, configs[i].n, i % per);
  }
  SweepResult out;
  out.records.resize(total);
  parallel_for(total, jobs, [&](int i) { out.records[i] = run_one(configs[i]); });

  std::vector<double> xs, ys;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < per; ++s) {
      const double r = out.records[g * per + s].risk_mean;
      sum += r;
      sum_sq += r * r;
    }
    SweepPoint p;
    p.n = n_grid[g];
    p.mean_risk = sum / per;
    p.se = per > 1 ? std::sqrt(std::max(0.0, (sum_sq - per * p.mean_risk * p.mean_risk) / (per - 1)) / per)
                   : 0.0;
    p.reference = std::pow(static_cast<double>(base.d), base.k0) / p.n;
    out.points.push_back(p);
    xs.push_back(p.n);
    ys.push_back(p.mean_risk);
  }
  out.fit = fit_loglog_slope(xs, ys);
  return out;
}

AuditResult uniform_convergence_audit(int d, const std::vector<int>& m_grid, int n_probes,
                                      int seeds, double kappa, const std::vector<double>& bands,
                                      const SeedStreams& base_seeds, int jobs) {
  const harmonics::SphereDim dim(d);
  if (m_grid.empty()) throw Error(Errc::InvalidArgument, "empty width grid");
  for (std::size_t i = 1; i < m_grid.size(); ++i) {
    if (m_grid[i] <= m_grid[i - 1]) throw Error(Errc::InvalidArgument, "widths must be increasing");
  }
  if (n_probes < 2 || seeds < 1) throw Error(Errc::InvalidArgument, "need >= 2 probes and >= 1 seed");
  if (!(kappa > 0.0)) throw Error(Errc::InvalidArgument, "kappa must be positive");

  struct Cell {
    double sup_error = 0.0;
    std::vector<ntk::BandEstimate> bands;
  };
  const int total = static_cast<int>(m_grid.size()) * seeds;
  std::vector<Cell> cells(total);
  parallel_for(total, jobs, [&](int i) {
    const int m = m_grid[i / seeds];
    const int s = i % seeds;
    // The probe set depends on the seed only, so every width sees the same probes.
    const PointSet probes =
        harmonics::sample_sphere(dim, n_probes, derive_seed(base_seeds.data, d, s));
    Rng rng = make_rng(derive_seed(base_seeds.init, static_cast<std::uint64_t>(m), s));
    std::normal_distribution<double> normal(0.0, kappa);
    Matrix w(m, d);
    for (int r = 0; r < m; ++r) {
      for (int j = 0; j < d; ++j) w(r, j) = normal(rng);
    }
    cells[i].sup_error = ntk::sup_kernel_error(w, probes).sup_error;
    for (double band : bands) cells[i].bands.push_back(ntk::band_statistics(w, probes, band, kappa));
  });

  AuditResult out;
  out.m_grid = m_grid;
  for (std::size_t g = 0; g < m_grid.size(); ++g) {
    const int m = m_grid[g];
    const double reference = std::sqrt(d * std::log(static_cast<double>(m)) / m);
    double mean = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const Cell& c = cells[g * seeds + s];
      mean += c.sup_error;
      out.kernel_table.add_row({m, s, c.sup_error, reference, c.sup_error / reference});
      for (std::size_t b = 0; b < bands.size(); ++b) {
        out.band_table.add_row({m, s, bands[b], c.bands[b].mean, c.bands[b].sup_vs_linear,
                                c.bands[b].sup_vs_exact});
      }
    }
    out.mean_sup_error.push_back(mean / seeds);
  }
  return out;
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GDP_SPHERE_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  if (count <= 0) return;
  const int workers = std::clamp(jobs, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

select::SelectionReport run_selection(const config::RunConfig& cfg) {
  cfg.validate();
  const auto t = build_target(cfg);
  const auto ts = build_training_set(cfg, t);
  select::SelectOptions opts;
  opts.backend = cfg.backend;
  opts.loss_mode = cfg.select.loss_mode;
  opts.eta = cfg.eta;
  opts.step_scale = cfg.select.step_scale;
  opts.m = cfg.m;
  opts.kappa = cfg.kappa;
  opts.init_seed = cfg.seeds.init;
  opts.epsilon0 = cfg.select.epsilon0;
  return select::select_degree(ts, t.spectrum, cfg.select.start_degree, cfg.select.beta0, opts);
}

}  // namespace gdp::harness
