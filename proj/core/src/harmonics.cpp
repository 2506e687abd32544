#include "gdp/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gdp/error.hpp"
#include "gdp/random.hpp"

namespace gdp::harmonics {

SphereDim::SphereDim(int d) : d_(d) {
  if (d < 3) {
    throw Error(Errc::InvalidArgument,
                "sphere dimension must be >= 3, got d=" + std::to_string(d));
  }
}

namespace {

double clamp_unit(double t) {
  constexpr double kSlack = 1e-12;
  if (!(std::abs(t) <= 1.0 + kSlack)) {
    throw Error(Errc::InvalidArgument,
                "Legendre argument outside [-1, 1]: " + std::to_string(t));
  }
  return std::clamp(t, -1.0, 1.0);
}

// Off-diagonal of the Jacobi matrix for the orthonormal family
// p_k = sqrt(N(d,k)) P_k under the normalized weight:
//   b_k^2 = k (k + d - 3) / ((2k + d - 2)(2k + d - 4)),  k >= 1.
double jacobi_offdiag(int k, int d) {
  const double kk = k;
  const double num = kk * (kk + d - 3);
  const double den = (2.0 * kk + d - 2) * (2.0 * kk + d - 4);
  return std::sqrt(num / den);
}

struct OrthoEval {
  double p;       // p_n(t)
  double dp;      // p_n'(t)
  double sum_sq;  // sum_{k<n} p_k(t)^2
};

OrthoEval eval_orthonormal(int n, const std::vector<double>& b, double t) {
  double p_prev = 0.0, p = 1.0;
  double dp_prev = 0.0, dp = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    sum_sq += p * p;
    const double b_next = b[k + 1];
    const double b_cur = b[k];
    const double p_next = (t * p - b_cur * p_prev) / b_next;
    const double dp_next = (p + t * dp - b_cur * dp_prev) / b_next;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp, sum_sq};
}

}  // namespace

double legendre_p(int k, SphereDim d, double t) {
  if (k < 0) throw Error(Errc::InvalidArgument, "Legendre degree must be >= 0");
  t = clamp_unit(t);
  if (k == 0) return 1.0;
  const int dd = d.value();
  double p_prev = 1.0, p = t;
  for (int j = 1; j < k; ++j) {
    // t P_j = j/(2j+d-2) P_{j-1} + (j+d-2)/(2j+d-2) P_{j+1}
    const double p_next = ((2.0 * j + dd - 2) * t * p - j * p_prev) / (j + dd - 2);
    p_prev = p;
    p = p_next;
  }
  return p;
}

std::vector<double> legendre_all(int kmax, SphereDim d, double t) {
  if (kmax < 0) throw Error(Errc::InvalidArgument, "Legendre degree must be >= 0");
  t = clamp_unit(t);
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
  out[0] = 1.0;
  if (kmax >= 1) out[1] = t;
  const int dd = d.value();
  for (int j = 1; j < kmax; ++j) {
    out[j + 1] = ((2.0 * j + dd - 2) * t * out[j] - j * out[j - 1]) / (j + dd - 2);
  }
  return out;
}

std::uint64_t harmonic_dim(SphereDim d, int k) {
  if (k < 0) throw Error(Errc::InvalidArgument, "harmonic degree must be >= 0");
  if (k == 0) return 1;
  __extension__ typedef unsigned __int128 u128;
  constexpr u128 kMax = std::numeric_limits<std::uint64_t>::max();
  const int dd = d.value();
  // C(k + d - 3, d - 2), built so every intermediate is an exact binomial.
  const int top = k + dd - 3;
  const int r = std::min(dd - 2, k - 1);
  u128 c = 1;
  for (int i = 1; i <= r; ++i) {
    const u128 factor = static_cast<u128>(top - r + i);
    if (c > (static_cast<u128>(-1) / factor)) {
      throw Error(Errc::InvalidArgument, "N(d,k) overflows; use log_harmonic_dim");
    }
    c = c * factor / static_cast<u128>(i);
  }
  const u128 scale = static_cast<u128>(2 * k + dd - 2);
  if (c > (static_cast<u128>(-1) / scale)) {
    throw Error(Errc::InvalidArgument, "N(d,k) overflows; use log_harmonic_dim");
  }
  const u128 n = c * scale / static_cast<u128>(k);
  if (n > kMax) throw Error(Errc::InvalidArgument, "N(d,k) overflows; use log_harmonic_dim");
  return static_cast<std::uint64_t>(n);
}

double log_harmonic_dim(SphereDim d, int k) {
  if (k < 0) throw Error(Errc::InvalidArgument, "harmonic degree must be >= 0");
  if (k == 0) return 0.0;
  const double dd = d.value();
  return std::log(2.0 * k + dd - 2) - std::log(static_cast<double>(k)) +
         std::lgamma(k + dd - 2) - std::lgamma(dd - 1) - std::lgamma(static_cast<double>(k));
}

std::uint64_t cumulative_dim(SphereDim d, int k) {
  if (k < 0) throw Error(Errc::InvalidArgument, "harmonic degree must be >= 0");
  std::uint64_t total = 0;
  for (int l = 0; l <= k; ++l) {
    const std::uint64_t n = harmonic_dim(d, l);
    if (total > std::numeric_limits<std::uint64_t>::max() - n) {
      throw Error(Errc::InvalidArgument, "cumulative dimension overflows");
    }
    total += n;
  }
  return total;
}

double surface_ratio(SphereDim d) {
  const double dd = d.value();
  return std::exp(std::lgamma(0.5 * dd) - std::lgamma(0.5 * (dd - 1)) -
                  0.5 * std::log(std::numbers::pi));
}

QuadratureRule make_quadrature(SphereDim d, int n_nodes) {
  if (n_nodes < 1) throw Error(Errc::InvalidArgument, "quadrature needs at least one node");
  const int dd = d.value();
  const int n = n_nodes;

  // b[0] is unused (p_{-1} = 0); b[k] for k = 1..n.
  std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) b[k] = jacobi_offdiag(k, dd);

  std::vector<double> nodes(n);
  if (n == 1) {
    nodes[0] = 0.0;
  } else {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = b[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw Error(Errc::ConvergenceFailure, "Jacobi-matrix eigenvalues did not converge");
    }
    for (int i = 0; i < n; ++i) nodes[i] = es.eigenvalues()[i];
  }

  // Newton polish on p_n, then Christoffel weights 1 / sum_k p_k(t)^2.
  std::vector<double> weights(n);
  for (int i = 0; i < n; ++i) {
    double t = nodes[i];
    bool converged = false;
    for (int iter = 0; iter < 50; ++iter) {
      const OrthoEval e = eval_orthonormal(n, b, t);
      const double step = e.p / e.dp;
      t -= step;
      if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon()) {
        converged = true;
        break;
      }
    }
    if (!converged || !std::isfinite(t) || std::abs(t) >= 1.0) {
      // Accept a last step below 1e-13 as converged; roundoff can make the
      // Newton step oscillate at the last ulp.
      const OrthoEval e = eval_orthonormal(n, b, t);
      if (!(std::abs(e.p / e.dp) < 1e-13) || std::abs(t) >= 1.0) {
        throw Error(Errc::ConvergenceFailure,
                    "quadrature node " + std::to_string(i) + " did not converge");
      }
    }
    nodes[i] = t;
    weights[i] = 1.0 / eval_orthonormal(n, b, t).sum_sq;
  }

  // The rule is symmetric about 0; enforce it exactly.
  std::vector<std::size_t> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto c) { return nodes[a] < nodes[c]; });
  QuadratureRule rule{d, std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = nodes[order[i]];
    rule.weights[i] = weights[order[i]];
  }
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double t = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -t;
    rule.nodes[j] = t;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule make_angular_quadrature(SphereDim d, int n_nodes) {
  if (n_nodes < 2 || n_nodes % 2 != 0) {
    throw Error(Errc::InvalidArgument, "angular quadrature needs an even node count >= 2");
  }
  const QuadratureRule gl = make_quadrature(SphereDim(3), n_nodes / 2);  // sums to 1
  const double ratio = surface_ratio(d);
  const double power = d.value() - 2;
  const double half_pi = 0.5 * std::numbers::pi;

  QuadratureRule rule{d, {}, {}};
  rule.nodes.reserve(n_nodes);
  rule.weights.reserve(n_nodes);
  // Ascending t means descending theta: walk [pi/2, pi] first, reversed.
  for (int half = 1; half >= 0; --half) {
    const double lo = half * half_pi;
    for (int j = static_cast<int>(gl.size()) - 1; j >= 0; --j) {
      const double theta = lo + half_pi * 0.5 * (1.0 + gl.nodes[j]);
      // Gauss-Legendre weight on an interval of length pi/2 is (pi/2) * 2 g_j / 2.
      const double w = half_pi * gl.weights[j];
      rule.nodes.push_back(std::cos(theta));
      rule.weights.push_back(ratio * std::pow(std::sin(theta), power) * w);
    }
  }
  return rule;
}

PointSet sample_sphere(SphereDim d, int n, std::mt19937_64& rng) {
  if (n < 1) throw Error(Errc::InvalidArgument, "sample_sphere needs n >= 1");
  const int dd = d.value();
  std::normal_distribution<double> normal(0.0, 1.0);
  PointSet x(n, dd);
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (int j = 0; j < dd; ++j) x(i, j) = normal(rng);
      norm = x.row(i).norm();
    } while (!(norm > 1e-300));
    x.row(i) /= norm;
  }
  return x;
}

PointSet sample_sphere(SphereDim d, int n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_sphere(d, n, rng);
}

void require_on_sphere(const PointSet& x, double tol) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double norm = x.row(i).norm();
    if (!(std::abs(norm - 1.0) <= tol)) {
      throw Error(Errc::NotOnSphere,
                  "row " + std::to_string(i) + " has norm " + std::to_string(norm));
    }
  }
}

}  // namespace gdp::harmonics
