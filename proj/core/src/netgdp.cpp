#include "gdp/netgdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "gdp/error.hpp"
#include "gdp/random.hpp"

namespace gdp::netgdp {

namespace {

constexpr int kGuardInterval = 10;
constexpr int kRiskChunk = 1024;

// Indicator 1{z >= 0} as 0/1 doubles.
Matrix active(const Matrix& pre) { return (pre.array() >= 0.0).cast<double>().matrix(); }

void check_batch(const NetworkState& net, const PointSet& x) {
  if (x.cols() != net.d()) {
    throw Error(Errc::DimensionMismatch, "inputs have dimension " + std::to_string(x.cols()) +
                                             ", network expects " + std::to_string(net.d()));
  }
  harmonics::require_on_sphere(x);
}

// Per-training-set quantities that do not change during training.
struct StepCache {
  Matrix f0;  // m x n, F(W0, S)
};

StepCache make_cache(const NetworkState& net, const PointSet& s) {
  return {active(net.w0 * s.transpose())};
}

// Network output on the training set given the current pre-activations.
Vector forward_cached(const NetworkState& net, const Matrix& pre, const StepCache& cache) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(net.m()));
  const Vector relu_part = pre.cwiseMax(0.0).transpose() * net.a;
  const Vector aug_part = cache.f0.transpose() * net.w_aug;
  return scale * (relu_part + aug_part);
}

// In-place update from the residual u = ŷ - y of the current weights, whose
// training-set pre-activations are `pre`.
void apply_update(NetworkState& net, const PointSet& s, const Matrix& pre, const Vector& u,
                  const spectral::SpectralProjector& p, double eta, const StepCache& cache) {
  if (eta == 0.0) return;
  const Vector v = p.apply(u);
  const double n = static_cast<double>(s.rows());
  const double c = eta / (n * std::sqrt(static_cast<double>(net.m())));
  // Row r of G is sum_i 1{w_r.x_i >= 0} v_i x_i.
  const Matrix g = (active(pre) * v.asDiagonal()) * s;
  net.w.noalias() -= c * (net.a.asDiagonal() * g);
  net.w_aug.noalias() -= c * (cache.f0 * v);
  ++net.step;
}

double max_row_movement(const NetworkState& net) {
  return (net.w - net.w0).rowwise().norm().maxCoeff();
}

void check_shapes(const NetworkState& net, const PointSet& s, const Vector& y,
                  const spectral::SpectralProjector& p) {
  if (s.rows() != y.size() || p.n() != y.size()) {
    throw Error(Errc::DimensionMismatch, "training set, labels and projector disagree on n");
  }
  if (s.cols() != net.d()) {
    throw Error(Errc::DimensionMismatch, "feature dimension differs from the network input");
  }
}

RiskEstimate monte_carlo(const std::function<Vector(const PointSet&)>& model,
                         const target::ZonalTarget& t, int n_mc, std::uint64_t seed) {
  if (n_mc < 1000) throw Error(Errc::InvalidArgument, "population risk needs n_mc >= 1000");
  Rng rng = make_rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (int done = 0; done < n_mc; done += kRiskChunk) {
    const int batch = std::min(kRiskChunk, n_mc - done);
    const PointSet x = harmonics::sample_sphere(t.d, batch, rng);
    const Vector err = model(x) - target::evaluate_target(t, x);
    for (int i = 0; i < batch; ++i) {
      const double e2 = err[i] * err[i];
      sum += e2;
      sum_sq += e2 * e2;
    }
  }
  RiskEstimate out;
  out.samples = n_mc;
  out.mean = sum / n_mc;
  const double var = std::max(0.0, (sum_sq - n_mc * out.mean * out.mean) / (n_mc - 1));
  out.se = std::sqrt(var / n_mc);
  return out;
}

}  // namespace

NetworkState init_network(int m, SphereDim d, double kappa, std::uint64_t seed) {
  if (m < 2) throw Error(Errc::InvalidArgument, "width must be >= 2");
  if (m % 2 != 0) throw Error(Errc::OddWidth, "width must be even, got " + std::to_string(m));
  if (!(kappa > 0.0)) throw Error(Errc::InvalidArgument, "kappa must be positive");
  const int dd = d.value();
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, kappa);
  std::bernoulli_distribution coin(0.5);

  NetworkState net;
  net.w.resize(m, dd);
  net.a.resize(m);
  for (int pair = 0; pair < m / 2; ++pair) {
    for (int j = 0; j < dd; ++j) net.w(2 * pair, j) = normal(rng);
    net.w.row(2 * pair + 1) = net.w.row(2 * pair);
    const double sign = coin(rng) ? 1.0 : -1.0;
    net.a[2 * pair] = -sign;
    net.a[2 * pair + 1] = sign;
  }
  net.w_aug = Vector::Zero(m);
  net.w0 = net.w;
  net.kappa = kappa;
  net.seed = seed;
  return net;
}

Vector forward(const NetworkState& net, const PointSet& x) {
  check_batch(net, x);
  const StepCache cache = make_cache(net, x);
  return forward_cached(net, net.w * x.transpose(), cache);
}

void GdpConfig::validate(int n) const {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(Errc::InvalidArgument, "eta must lie in (0, 1), got " + std::to_string(eta));
  }
  if (steps < 0) throw Error(Errc::InvalidArgument, "step count must be >= 0");
  if (rank != 0 && (rank < 1 || rank > n)) {
    throw Error(Errc::RankOutOfRange,
                "rank " + std::to_string(rank) + " outside [1, " + std::to_string(n) + "]");
  }
}

NetworkState gdp_step(const NetworkState& net, const PointSet& s, const Vector& y,
                      const spectral::SpectralProjector& p, double eta) {
  check_shapes(net, s, y, p);
  harmonics::require_on_sphere(s);
  NetworkState next = net;
  const StepCache cache = make_cache(net, s);
  const Matrix pre = net.w * s.transpose();
  const Vector u = forward_cached(net, pre, cache) - y;
  apply_update(next, s, pre, u, p, eta, cache);
  return next;
}

TrainResult train(NetworkState net, const target::TrainingSet& ts,
                  const spectral::SpectralProjector& p, const GdpConfig& cfg) {
  const int n = ts.n();
  cfg.validate(n);
  check_shapes(net, ts.features, ts.y, p);
  if (cfg.rank != 0 && cfg.rank != p.rank()) {
    throw Error(Errc::InvalidArgument, "config rank " + std::to_string(cfg.rank) +
                                           " differs from projector rank " +
                                           std::to_string(p.rank()));
  }
  harmonics::require_on_sphere(ts.features);

  const StepCache cache = make_cache(net, ts.features);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double sqrt_m = std::sqrt(static_cast<double>(net.m()));
  TrainTrace trace;
  trace.loss.reserve(cfg.steps + 1);
  trace.residual_norm.reserve(cfg.steps + 1);
  trace.max_movement.reserve(cfg.steps + 1);
  trace.r_bound.reserve(cfg.steps + 1);

  double c_u = 0.0;
  Vector u;
  for (int t = 0;; ++t) {
    const Matrix pre = net.w * ts.features.transpose();
    u = forward_cached(net, pre, cache) - ts.y;
    const double norm = u.norm();
    c_u = std::max(c_u, norm / sqrt_n);
    trace.loss.push_back(0.5 * norm * norm / n);
    trace.residual_norm.push_back(norm);
    trace.max_movement.push_back(max_row_movement(net));
    trace.r_bound.push_back(cfg.eta * c_u * t / sqrt_m);
    if (t > 0 && (t % kGuardInterval == 0 || t == cfg.steps)) {
      if (!net.w.allFinite() || !net.w_aug.allFinite() || !std::isfinite(norm)) {
        throw Error(Errc::NumericalDivergence,
                    "non-finite weights or loss at step " + std::to_string(t) + " (eta " +
                        std::to_string(cfg.eta) + ", previous loss " +
                        std::to_string(trace.loss[trace.loss.size() - 2]) + ")");
      }
    }
    if (t == cfg.steps) break;
    apply_update(net, ts.features, pre, u, p, cfg.eta, cache);
  }
  return {std::move(net), std::move(trace), std::move(u)};
}

Vector KernelModelState::predict(const PointSet& x) const {
  if (x.cols() != features.cols()) {
    throw Error(Errc::DimensionMismatch, "query points and features differ in dimension");
  }
  harmonics::require_on_sphere(x);
  return spectral::cross_kernel(x, features) * alpha;
}

KernelTrainResult kernel_train(const target::TrainingSet& ts, const spectral::SpectralProjector& p,
                               const GdpConfig& cfg, bool keep_history) {
  const int n = ts.n();
  cfg.validate(n);
  if (p.n() != n) throw Error(Errc::DimensionMismatch, "projector size differs from n");
  if (cfg.rank != 0 && cfg.rank != p.rank()) {
    throw Error(Errc::InvalidArgument, "config rank " + std::to_string(cfg.rank) +
                                           " differs from projector rank " +
                                           std::to_string(p.rank()));
  }

  // In the eigenbasis of K_n the recursion is diagonal: the top-r coordinates
  // shrink by (1 - eta lambda_i) per step and the trailing ones never move.
  const Matrix& u_basis = p.u();
  const int r = p.rank();
  const auto lambda = p.eigvals().head(r).array();
  const Eigen::ArrayXd shrink = 1.0 - cfg.eta * lambda;
  Vector c = u_basis.transpose() * (-ts.y);
  Eigen::ArrayXd c_sum = Eigen::ArrayXd::Zero(r);

  KernelTrainResult out;
  out.model.features = ts.features;
  auto& trace = out.trace;
  trace.loss.reserve(cfg.steps + 1);
  trace.residual_norm.reserve(cfg.steps + 1);
  if (keep_history) out.model.history.reserve(cfg.steps + 1);

  for (int t = 0;; ++t) {
    const double norm = c.norm();
    trace.loss.push_back(0.5 * norm * norm / n);
    trace.residual_norm.push_back(norm);
    if (keep_history) out.model.history.push_back(u_basis * c);
    if (t > 0 && (t % kGuardInterval == 0 || t == cfg.steps) && !std::isfinite(norm)) {
      throw Error(Errc::NumericalDivergence,
                  "non-finite residual at kernel step " + std::to_string(t));
    }
    if (t == cfg.steps) break;
    c_sum += c.head(r).array();
    c.head(r).array() *= shrink;
  }

  out.model.u = u_basis * c;
  out.model.alpha = (-cfg.eta / n) * (u_basis.leftCols(r) * c_sum.matrix());
  return out;
}

RiskEstimate population_risk(const NetworkState& net, const target::ZonalTarget& t, int n_mc,
                             std::uint64_t seed) {
  if (net.d() != t.d.value()) {
    throw Error(Errc::DimensionMismatch, "network and target dimensions differ");
  }
  return monte_carlo([&](const PointSet& x) { return forward(net, x); }, t, n_mc, seed);
}

RiskEstimate population_risk(const KernelModelState& model, const target::ZonalTarget& t,
                             int n_mc, std::uint64_t seed) {
  if (model.features.cols() != t.d.value()) {
    throw Error(Errc::DimensionMismatch, "model and target dimensions differ");
  }
  return monte_carlo([&](const PointSet& x) { return model.predict(x); }, t, n_mc, seed);
}

}  // namespace gdp::netgdp
