#include "gdp/select.hpp"

#include <cmath>
#include <string>

#include "gdp/emit.hpp"
#include "gdp/error.hpp"
#include "gdp/harmonics.hpp"

namespace gdp::select {

namespace {

int level_steps(double step_scale, int n, int d, int ell) {
  const double t = std::round(step_scale * n / std::pow(static_cast<double>(d), ell));
  return t < 1.0 ? 1 : static_cast<int>(std::min(t, 1e9));
}

double level_loss(const Vector& fitted, const target::TrainingSet& ts, LossMode mode) {
  const double n = ts.n();
  if (mode == LossMode::Clean) return (fitted - ts.f_star).squaredNorm() / n;
  return (fitted - ts.y).squaredNorm() / n - ts.sigma0 * ts.sigma0;
}

}  // namespace

SelectionReport select_degree(const target::TrainingSet& ts, const ntk::KernelSpectrum& spectrum,
                              int start_degree, double beta0, const SelectOptions& opts) {
  if (!(beta0 > 0.0)) throw Error(Errc::InvalidArgument, "beta0 must be positive");
  if (!(opts.step_scale > 0.0)) throw Error(Errc::InvalidArgument, "step_scale must be positive");
  SelectionReport report;
  report.thresholds = {beta0, beta0 * beta0 / 4.0, beta0 * beta0 / 8.0};
  if (start_degree < 0) return report;

  const int n = ts.n();
  const harmonics::SphereDim d(static_cast<int>(ts.features.cols()));
  if (!(spectrum.d == d)) throw Error(Errc::DimensionMismatch, "spectrum dimension differs from data");
  if (spectrum.max_degree < start_degree + 1) {
    throw Error(Errc::InvalidArgument, "spectrum must cover degree L + 1 = " +
                                           std::to_string(start_degree + 1));
  }
  const std::uint64_t m_top = harmonics::cumulative_dim(d, start_degree);
  if (m_top > static_cast<std::uint64_t>(n)) {
    throw Error(Errc::StartDegreeTooLarge, "m_L = " + std::to_string(m_top) + " exceeds n = " +
                                               std::to_string(n));
  }

  auto eig = opts.eigensystem;
  if (!eig) {
    eig = std::make_shared<const spectral::Eigensystem>(
        spectral::eigendecompose(spectral::build_gram(ts.features)));
  } else if (eig->n() != n) {
    throw Error(Errc::DimensionMismatch, "eigensystem size differs from n");
  }

  auto make_record = [&](int ell, std::uint64_t r, int steps, double loss) {
    LevelRecord rec{ell, r, steps, loss, spectrum.mu_at(ell + 1), 0.0, false, false};
    rec.ratio = loss / rec.mu_next;
    rec.lower_hit = rec.ratio >= report.thresholds.lower;
    rec.upper_hit = rec.ratio <= report.thresholds.upper;
    return rec;
  };

  for (int ell = start_degree; ell >= -1; --ell) {
    if (ell == -1) {
      report.per_level.push_back(make_record(-1, 0, 0, level_loss(Vector::Zero(n), ts, opts.loss_mode)));
    } else {
      const std::uint64_t r = harmonics::cumulative_dim(d, ell);
      const int steps = level_steps(opts.step_scale, n, d.value(), ell);
      const spectral::SpectralProjector p(eig, static_cast<int>(r));
      netgdp::GdpConfig cfg{opts.eta, steps, static_cast<int>(r), opts.backend};
      Vector residual;
      if (opts.backend == netgdp::Backend::KernelExact) {
        residual = netgdp::kernel_train(ts, p, cfg).model.u;
      } else {
        auto net = netgdp::init_network(opts.m, d, opts.kappa, opts.init_seed);
        residual = netgdp::train(std::move(net), ts, p, cfg).residual;
      }
      report.per_level.push_back(make_record(ell, r, steps, level_loss(ts.y + residual, ts, opts.loss_mode)));
    }
    if (ell < start_degree) {
      const auto& cur = report.per_level[report.per_level.size() - 1];
      const auto& prev = report.per_level[report.per_level.size() - 2];
      if (cur.lower_hit && prev.upper_hit) {
        report.triggered_level = ell;
        report.chosen_degree = ell + 1;
        break;
      }
    }
  }
  return report;
}

void loss_ratio_table(const SelectionReport& report, std::ostream& os) {
  emit::Table table({"ell", "r", "T_ell", "E_ell", "mu_next", "ratio", "lower_hit", "upper_hit"});
  for (const auto& rec : report.per_level) {
    table.add_row({rec.ell, static_cast<std::int64_t>(rec.r), rec.steps, rec.loss, rec.mu_next,
                   rec.ratio, rec.lower_hit, rec.upper_hit});
  }
  table.write_csv(os);
}

}  // namespace gdp::select
