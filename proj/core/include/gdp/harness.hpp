#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gdp/config.hpp"
#include "gdp/emit.hpp"
#include "gdp/netgdp.hpp"
#include "gdp/select.hpp"
#include "gdp/target.hpp"

namespace gdp::harness {

struct RunRecord {
  config::RunConfig config;
  std::string config_hash;
  int steps = 0;
  int rank = 0;
  double final_train_loss = 0.0;
  double risk_mean = 0.0;
  double risk_se = 0.0;
  double reference = 0.0;  // d^k0 / n
  double loss_quarter = 0.0;
  double loss_half = 0.0;
  double loss_final = 0.0;
  double max_movement = 0.0;  // finite backend only
  double r_bound = 0.0;       // finite backend only
  double wall_seconds = 0.0;
};

/// Degree energies of the configured target: the explicit list, or
/// c_l = gamma0 sqrt(mu_l / (k0 + 1)) when none is given.
std::vector<double> resolved_energies(const config::RunConfig& cfg,
                                      const ntk::KernelSpectrum& spectrum);

/// Target and training set exactly as run_one builds them.
target::ZonalTarget build_target(const config::RunConfig& cfg);
target::TrainingSet build_training_set(const config::RunConfig& cfg,
                                       const target::ZonalTarget& t);

/// Build target and data, eigendecompose K_n, train with the configured
/// backend and estimate the population risk. Errors are rethrown with the
/// config hash attached.
RunRecord run_one(const config::RunConfig& cfg);

/// run_one plus the per-step trace and, for the finite-width backend, the
/// trained network.
struct DetailedRun {
  RunRecord record;
  netgdp::TrainTrace trace;
  std::optional<netgdp::NetworkState> net;
};
DetailedRun run_detailed(const config::RunConfig& cfg);

/// Columns t, loss, residual_norm, max_movement, r_bound (the last two are
/// empty for the kernel backend).
emit::Table trace_table(const netgdp::TrainTrace& trace);

/// run_one with r = n (plain gradient descent, no projection).
RunRecord run_vanilla(config::RunConfig cfg);

emit::Table records_table(const std::vector<RunRecord>& records);

/// Least-squares slope and intercept of log y against log x.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LogLogFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SweepPoint {
  int n = 0;
  double mean_risk = 0.0;
  double se = 0.0;  // across seeds
  double reference = 0.0;
};

struct SweepResult {
  std::vector<RunRecord> records;
  std::vector<SweepPoint> points;
  LogLogFit fit;

  emit::Table points_table() const;
};

/// Seeds of replicate `index` at sample size n: every stream except the
/// target poles is re-derived, so the target stays fixed across the sweep.
SeedStreams replicate_seeds(const SeedStreams& base, int n, int index);

/// For each n in the grid, average run_one risk over seeds_per_n replicates
/// and fit the log-log slope. n_grid must be strictly increasing with at
/// least 4 entries. Runs execute on `jobs` workers.
SweepResult rate_sweep(const config::RunConfig& base, const std::vector<int>& n_grid,
                       int seeds_per_n, int jobs = 1);

struct AuditResult {
  emit::Table kernel_table{{"m", "seed", "sup_error", "reference", "ratio"}};
  emit::Table band_table{{"m", "seed", "R", "mean_v", "sup_vs_linear", "sup_vs_exact"}};
  std::vector<int> m_grid;
  std::vector<double> mean_sup_error;  // per m, averaged over seeds
};

/// Finite-width kernel estimate h(W, ., .) against K0 over a fixed probe set
/// per seed, W rows i.i.d. N(0, kappa^2 I_d). Band statistics use the given R
/// values. reference = sqrt(d log m / m).
AuditResult uniform_convergence_audit(int d, const std::vector<int>& m_grid, int n_probes,
                                      int seeds, double kappa, const std::vector<double>& bands,
                                      const SeedStreams& base_seeds, int jobs = 1);

/// Worker count: `requested` if positive, else GDP_SPHERE_JOBS, else the
/// number of hardware threads.
int resolve_jobs(int requested);

/// Runs task(i) for i in [0, count) on at most `jobs` threads. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(int count, int jobs, const std::function<void(int)>& task);

/// Selection on the configured target and data, using cfg.select.
select::SelectionReport run_selection(const config::RunConfig& cfg);

}  // namespace gdp::harness
