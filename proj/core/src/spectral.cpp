#include "gdp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "gdp/error.hpp"
#include "gdp/harmonics.hpp"
#include "gdp/log.hpp"

extern "C" {
// LAPACK divide-and-conquer symmetric eigensolver (Fortran ABI, trailing
// hidden string lengths).
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork, int* info,
             std::size_t jobz_len, std::size_t uplo_len);
}

namespace gdp::spectral {

namespace {
constexpr double kDuplicateThreshold = 1.0 - 1e-12;
constexpr double kTieTolerance = 1e-10;
constexpr double kVerifyTolerance = 1e-8;

// Cheap a-posteriori check of A = U diag(w) U^T: residuals of a few
// eigenpairs spread over the spectrum plus orthogonality along one random
// direction, O(n^2) in total.
bool plausible(const Matrix& a, const Matrix& u, const Vector& w) {
  const Eigen::Index n = a.rows();
  const double scale = std::max({std::abs(w[0]), std::abs(w[n - 1]), 1e-300});
  if (!u.allFinite() || !w.allFinite()) return false;
  const Eigen::Index probes = std::min<Eigen::Index>(n, 8);
  for (Eigen::Index k = 0; k < probes; ++k) {
    const Eigen::Index j = probes == 1 ? 0 : k * (n - 1) / (probes - 1);
    const double res = (a * u.col(j) - w[j] * u.col(j)).norm();
    if (!(res <= kVerifyTolerance * scale)) return false;
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = std::sin(1.0 + 0.7548776662 * static_cast<double>(i));
  const double orth = (u.transpose() * (u * v) - v).norm() / v.norm();
  return orth <= kVerifyTolerance;
}

Eigensystem eigen_fallback(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric);
  if (es.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "Eigen symmetric eigensolver did not converge");
  }
  return {es.eigenvectors().rowwise().reverse(), es.eigenvalues().reverse()};
}

}  // namespace

GramPair build_gram(const PointSet& features) {
  const Eigen::Index n = features.rows();
  if (n < 1) throw Error(Errc::InvalidArgument, "empty feature matrix");
  if (n > kMaxSamples) {
    throw Error(Errc::InvalidArgument, "n = " + std::to_string(n) + " exceeds the dense cap " +
                                           std::to_string(kMaxSamples));
  }
  harmonics::require_on_sphere(features);
  const Matrix inner = features * features.transpose();
  GramPair g{Matrix(n, n), Matrix(n, n), features};
  for (Eigen::Index j = 0; j < n; ++j) {
    g.k(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double t = 0.5 * (inner(i, j) + inner(j, i));
      if (t > kDuplicateThreshold) {
        throw Error(Errc::DuplicateFeature,
                    "rows " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
      }
      const double v = ntk::kernel_value(ntk::KernelProfile::K, t);
      g.k(i, j) = v;
      g.k(j, i) = v;
    }
  }
  g.kn = g.k / static_cast<double>(n);
  return g;
}

Matrix cross_kernel(const PointSet& x, const PointSet& features) {
  if (x.cols() != features.cols()) {
    throw Error(Errc::DimensionMismatch, "query points and features differ in dimension");
  }
  Matrix out = x * features.transpose();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      out(i, j) = ntk::kernel_value(ntk::KernelProfile::K, out(i, j));
    }
  }
  return out;
}

Eigensystem eigendecompose(const Matrix& symmetric) {
  const int n = static_cast<int>(symmetric.rows());
  if (symmetric.cols() != n) throw Error(Errc::DimensionMismatch, "matrix is not square");
  if (n == 0) return {};
  Matrix a = symmetric;
  Vector w(n);
  const char jobz = 'V';
  const char uplo = 'L';
  int info = 0;
  int lwork = -1, liwork = -1;
  double work_query = 0.0;
  int iwork_query = 0;
  dsyevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), &work_query, &lwork, &iwork_query, &liwork,
          &info, 1, 1);
  if (info != 0) throw Error(Errc::ConvergenceFailure, "dsyevd workspace query failed");
  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(static_cast<std::size_t>(std::max(1, lwork)));
  std::vector<int> iwork(static_cast<std::size_t>(std::max(1, liwork)));
  dsyevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(), &liwork,
          &info, 1, 1);
  if (info != 0) {
    throw Error(Errc::ConvergenceFailure, "dsyevd failed with info = " + std::to_string(info));
  }
  if (!plausible(symmetric, a, w)) {
    // Seen with OpenBLAS builds whose auto-selected AVX-512 kernels are
    // miscompiled for the host; eigenvalues survive, eigenvectors do not.
    warn("LAPACK dsyevd returned an inconsistent eigensystem (n = " + std::to_string(n) +
         "); recomputing with the Eigen solver. Setting OPENBLAS_CORETYPE (e.g. Haswell) "
         "usually restores the fast path.");
    return eigen_fallback(symmetric);
  }
  // LAPACK returns ascending order; flip to non-increasing.
  return {a.rowwise().reverse(), w.reverse()};
}

Eigensystem eigendecompose(const GramPair& gram) { return eigendecompose(gram.kn); }

SpectralProjector::SpectralProjector(std::shared_ptr<const Eigensystem> eig, int r)
    : eig_(std::move(eig)), r_(r) {
  if (!eig_) throw Error(Errc::InvalidArgument, "null eigensystem");
  const int n = eig_->n();
  if (r < 1 || r > n) {
    throw Error(Errc::RankOutOfRange,
                "rank " + std::to_string(r) + " outside [1, " + std::to_string(n) + "]");
  }
  if (r == n) {
    p_ = Matrix::Identity(n, n);
  } else {
    const auto ur = eig_->u.leftCols(r);
    p_.noalias() = ur * ur.transpose();
    const double gap = eig_->eigvals[r - 1] - eig_->eigvals[r];
    if (std::abs(gap) < kTieTolerance) {
      splits_tie_ = true;
      warn("projector rank " + std::to_string(r) +
           " splits a tied eigenvalue block (gap " + std::to_string(gap) +
           "); the projector is not uniquely defined");
    }
  }
}

Vector SpectralProjector::apply(const Vector& v) const {
  if (v.size() != n()) throw Error(Errc::DimensionMismatch, "vector length differs from n");
  if (r_ == n()) return v;
  const auto ur = eig_->u.leftCols(r_);
  return ur * (ur.transpose() * v);
}

SpectralProjector projector(std::shared_ptr<const Eigensystem> eig, int r) {
  return SpectralProjector(std::move(eig), r);
}

GapReport empirical_spectrum_gap_check(const Vector& eigvals, const ntk::KernelSpectrum& spectrum,
                                       int n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::InvalidArgument, "delta must be in (0,1)");
  if (n < 1) throw Error(Errc::InvalidArgument, "n must be >= 1");
  GapReport rep;
  rep.envelope = 2.0 * std::sqrt(2.0 * std::log(2.0 / delta) / n);
  const std::size_t limit = std::min<std::size_t>(static_cast<std::size_t>(eigvals.size()),
                                                  static_cast<std::size_t>(n));
  const std::vector<double> population = ntk::extended_eigenvalues(spectrum, limit);
  rep.compared = population.size();
  for (std::size_t j = 0; j < rep.compared; ++j) {
    rep.max_gap = std::max(rep.max_gap, std::abs(population[j] - eigvals[static_cast<Eigen::Index>(j)]));
  }
  rep.within_envelope = rep.max_gap <= rep.envelope;
  // Below ~100 samples the envelope exceeds the largest eigenvalue and says nothing.
  rep.low_n = n < 100;
  rep.note = rep.low_n ? "low-n, envelope loose" : "";
  return rep;
}

}  // namespace gdp::spectral
