#pragma once

#include <cstdint>
#include <vector>

#include "gdp/harmonics.hpp"
#include "gdp/linalg.hpp"
#include "gdp/spectral.hpp"
#include "gdp/target.hpp"

namespace gdp::netgdp {

using harmonics::SphereDim;

/// Two-layer ReLU network with the augmented feature
///   f(W, x) = (1/sqrt m) sum_r a_r relu(w_r.x) + (1/sqrt m) w_aug . F(W0, x),
/// F(W0, x)_r = 1{w0_r.x >= 0}. Only W and w_aug are trained.
struct NetworkState {
  Matrix w;       // m x d
  Vector w_aug;   // m
  Vector a;       // m, entries +-1
  Matrix w0;      // m x d, frozen copy of the initialization
  double kappa = 1.0;
  std::uint64_t seed = 0;
  std::int64_t step = 0;

  int m() const noexcept { return static_cast<int>(w.rows()); }
  int d() const noexcept { return static_cast<int>(w.cols()); }
};

/// Symmetric initialization: rows 2r and 2r+1 share a N(0, kappa^2 I_d) draw
/// and carry opposite signs, w_aug = 0, so the network output is exactly 0.
/// Throws Errc::OddWidth for odd m and Errc::InvalidArgument for m < 2.
NetworkState init_network(int m, SphereDim d, double kappa, std::uint64_t seed);

/// Network output for every row of x (rows must be unit vectors).
Vector forward(const NetworkState& net, const PointSet& x);

enum class Backend { FiniteWidth, KernelExact };

struct GdpConfig {
  double eta = 0.5;
  int steps = 1;
  /// Projection rank; 0 accepts whatever rank the projector has.
  int rank = 0;
  Backend backend = Backend::FiniteWidth;

  /// Throws Errc::InvalidArgument unless 0 < eta < 1, steps >= 0 and the rank
  /// fits in [1, n].
  void validate(int n) const;
};

/// One GDP update with residual ŷ - y computed from the pre-step weights:
///   W     <- W     - eta/(n sqrt m) diag(a) [1{WS^T >= 0} diag(P u)] S
///   w_aug <- w_aug - eta/(n sqrt m) F(W0, S)^T P u
NetworkState gdp_step(const NetworkState& net, const PointSet& s, const Vector& y,
                      const spectral::SpectralProjector& p, double eta);

/// Per-step diagnostics; every vector has steps + 1 entries (index t is the
/// state after t updates). max_movement and r_bound stay empty for the
/// kernel backend, which has no weights.
struct TrainTrace {
  std::vector<double> loss;           // (1/2n) |u(t)|^2
  std::vector<double> residual_norm;  // |u(t)|
  std::vector<double> max_movement;   // max_r |w_r(t) - w_r(0)|
  std::vector<double> r_bound;        // eta * c_u(t) * t / sqrt(m)

  std::size_t size() const noexcept { return loss.size(); }
};

struct TrainResult {
  NetworkState net;
  TrainTrace trace;
  Vector residual;  // u(T) = ŷ(T) - y
};

/// Runs cfg.steps GDP updates. Checks for NaN/Inf every 10 steps and throws
/// Errc::NumericalDivergence with the offending step.
TrainResult train(NetworkState net, const target::TrainingSet& ts,
                  const spectral::SpectralProjector& p, const GdpConfig& cfg);

/// Infinite-width model f(x) = sum_i K(x, x_i) alpha_i.
struct KernelModelState {
  PointSet features;
  Vector alpha;
  Vector u;
  std::vector<Vector> history;  // u(0..T), filled only on request

  Vector predict(const PointSet& x) const;
};

struct KernelTrainResult {
  KernelModelState model;
  TrainTrace trace;
};

/// Exact recursion u(t+1) = (I - eta K_n P) u(t), u(0) = -y, with
/// alpha(t+1) = alpha(t) - (eta/n) P u(t). The projector must come from the
/// Gram matrix of ts.features.
KernelTrainResult kernel_train(const target::TrainingSet& ts, const spectral::SpectralProjector& p,
                               const GdpConfig& cfg, bool keep_history = false);

struct RiskEstimate {
  double mean = 0.0;
  double se = 0.0;
  int samples = 0;
};

/// Monte Carlo estimate of E[(f(x) - f*(x))^2] over n_mc fresh uniform points
/// drawn from `seed`. Requires n_mc >= 1000.
RiskEstimate population_risk(const NetworkState& net, const target::ZonalTarget& t, int n_mc,
                             std::uint64_t seed);
RiskEstimate population_risk(const KernelModelState& model, const target::ZonalTarget& t,
                             int n_mc, std::uint64_t seed);

}  // namespace gdp::netgdp
