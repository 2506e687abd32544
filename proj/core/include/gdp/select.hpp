#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "gdp/defaults.hpp"
#include "gdp/netgdp.hpp"
#include "gdp/ntk.hpp"
#include "gdp/spectral.hpp"
#include "gdp/target.hpp"

namespace gdp::select {

enum class LossMode {
  /// (1/n) |f_T(S) - f*(S)|^2, needs the noiseless labels.
  Clean,
  /// (1/n) |f_T(S) - y|^2 - sigma0^2.
  Debiased,
};

struct LevelRecord {
  int ell = 0;
  std::uint64_t r = 0;   // m_ell; 0 for the virtual level -1
  int steps = 0;         // T_ell
  double loss = 0.0;     // E_ell
  double mu_next = 0.0;  // mu_{ell+1}
  double ratio = 0.0;    // E_ell / mu_{ell+1}
  bool lower_hit = false;  // ratio >= beta0^2 / 4
  bool upper_hit = false;  // ratio <= beta0^2 / 8
};

struct Thresholds {
  double beta0 = 0.0;
  double lower = 0.0;  // beta0^2 / 4
  double upper = 0.0;  // beta0^2 / 8
};

struct SelectionReport {
  std::optional<int> chosen_degree;
  /// Level ell at which the pair test fired (chosen = ell + 1).
  std::optional<int> triggered_level;
  std::vector<LevelRecord> per_level;  // descending ell
  Thresholds thresholds;
};

struct SelectOptions {
  netgdp::Backend backend = netgdp::Backend::KernelExact;
  LossMode loss_mode = LossMode::Debiased;
  double eta = defaults::kEta;
  /// T_ell = max(1, round(step_scale * n / d^ell)).
  double step_scale = defaults::kStepScale;
  // Finite-width backend only.
  int m = defaults::kWidth;
  double kappa = defaults::kKappa;
  std::uint64_t init_seed = defaults::kSeedInit;
  /// Accepted for completeness; the decision rule does not use it.
  double epsilon0 = 0.0;
  /// Reuse a precomputed eigensystem of K_n over ts.features.
  std::shared_ptr<const spectral::Eigensystem> eigensystem;
};

/// Descending sweep ell = L, ..., 0 with rank r = m_ell and T_ell steps per
/// level. Stops at the first ell < L with E_ell/mu_{ell+1} >= beta0^2/4 and
/// E_{ell+1}/mu_{ell+2} <= beta0^2/8, returning ell + 1. Below degree 0 the
/// sweep evaluates a virtual level -1 holding the zero predictor, so degree 0
/// is chosen by the same pair test. L < 0 yields an empty report.
/// Throws Errc::StartDegreeTooLarge when m_L > n.
SelectionReport select_degree(const target::TrainingSet& ts, const ntk::KernelSpectrum& spectrum,
                              int start_degree, double beta0, const SelectOptions& opts = {});

/// CSV with header `ell,r,T_ell,E_ell,mu_next,ratio,lower_hit,upper_hit`.
void loss_ratio_table(const SelectionReport& report, std::ostream& os);

}  // namespace gdp::select
