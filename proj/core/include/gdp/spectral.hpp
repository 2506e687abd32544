#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gdp/linalg.hpp"
#include "gdp/ntk.hpp"

namespace gdp::spectral {

/// Largest training-set size the dense O(n^3) pipeline accepts.
inline constexpr int kMaxSamples = 8192;

/// Gram matrix of the NTK over the training features, and K_n = K / n.
struct GramPair {
  Matrix k;
  Matrix kn;
  PointSet features;

  int n() const noexcept { return static_cast<int>(k.rows()); }
};

/// K_ij = K(<x_i, x_j>), exactly symmetric with unit diagonal.
/// Throws Errc::NotOnSphere for rows off the sphere and Errc::DuplicateFeature
/// when two rows have inner product above 1 - 1e-12.
GramPair build_gram(const PointSet& features);

/// Kernel matrix between query points (rows of x) and the training features.
Matrix cross_kernel(const PointSet& x, const PointSet& features);

/// Full symmetric eigensystem K_n = U diag(eigvals) U^T with eigenvalues in
/// non-increasing order. Order inside a numerically tied block is whatever
/// the LAPACK routine produced.
struct Eigensystem {
  Matrix u;
  Vector eigvals;

  int n() const noexcept { return static_cast<int>(eigvals.size()); }
};

/// Throws Errc::ConvergenceFailure when the LAPACK driver reports failure.
Eigensystem eigendecompose(const Matrix& symmetric);
Eigensystem eigendecompose(const GramPair& gram);

/// Rank-r spectral projector P = U^{(r)} U^{(r)T} onto the top-r eigenvectors.
class SpectralProjector {
 public:
  /// Throws Errc::RankOutOfRange unless 1 <= r <= n. Warns when r splits a
  /// block of eigenvalues closer than 1e-10 (the projector is then not unique).
  SpectralProjector(std::shared_ptr<const Eigensystem> eig, int r);

  int rank() const noexcept { return r_; }
  int n() const noexcept { return eig_->n(); }
  const Matrix& p() const noexcept { return p_; }
  const Matrix& u() const noexcept { return eig_->u; }
  const Vector& eigvals() const noexcept { return eig_->eigvals; }
  const Eigensystem& eigensystem() const noexcept { return *eig_; }
  bool splits_tie() const noexcept { return splits_tie_; }

  /// P v through the thin factor, O(n r).
  Vector apply(const Vector& v) const;

 private:
  std::shared_ptr<const Eigensystem> eig_;
  int r_;
  Matrix p_;
  bool splits_tie_ = false;
};

SpectralProjector projector(std::shared_ptr<const Eigensystem> eig, int r);

/// Comparison between the empirical eigenvalues and the population spectrum
/// (each mu_l repeated N(d, l) times).
struct GapReport {
  double max_gap = 0.0;     // max_j |lambda_{j-1} - lambda_hat_j|
  double envelope = 0.0;    // 2 sqrt(2 log(2/delta) / n)
  std::size_t compared = 0; // number of indices compared
  bool within_envelope = false;
  bool low_n = false;
  std::string note;
};

GapReport empirical_spectrum_gap_check(const Vector& eigvals, const ntk::KernelSpectrum& spectrum,
                                       int n, double delta = 0.05);

}  // namespace gdp::spectral
