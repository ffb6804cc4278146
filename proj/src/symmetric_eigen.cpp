#include "symmetric_eigen.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "npdisks/errors.hpp"

#ifdef NPDISKS_HAVE_LAPACK
extern "C" void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda, double* w,
                        double* work, const int* lwork, int* iwork, const int* liwork, int* info);
#endif

namespace npdisks::detail {

namespace {

void eigen_path(const Eigen::MatrixXd& A, Eigen::VectorXd& values, Eigen::MatrixXd* vectors) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      A, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw DomainError("symmetric eigensolver failed to converge");
  values = es.eigenvalues();
  if (vectors) *vectors = es.eigenvectors();
}

#ifdef NPDISKS_HAVE_LAPACK
bool lapack_path(const Eigen::MatrixXd& A, Eigen::VectorXd& values, Eigen::MatrixXd* vectors) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd a = A;
  values.resize(n);
  const char jobz = vectors ? 'V' : 'N', uplo = 'L';
  int info = 0, lwork = -1, liwork = -1, iwq = 0;
  double wq = 0.0;
  dsyevd_(&jobz, &uplo, &n, a.data(), &n, values.data(), &wq, &lwork, &iwq, &liwork, &info);
  if (info != 0) return false;
  lwork = static_cast<int>(wq);
  liwork = iwq;
  std::vector<double> work(static_cast<size_t>(lwork));
  std::vector<int> iwork(static_cast<size_t>(liwork));
  dsyevd_(&jobz, &uplo, &n, a.data(), &n, values.data(), work.data(), &lwork, iwork.data(), &liwork, &info);
  if (info != 0) return false;
  if (vectors) *vectors = std::move(a);
  return true;
}

// Some optimised BLAS kernels return wrong eigenpairs on some CPUs, so the
// LAPACK path is only trusted after it reproduces a known decomposition.
bool self_test() {
  const int n = 256;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = std::sin(i + 2.0 * j) + std::sin(j + 2.0 * i) + (i == j ? 0.01 * i : 0.0);
  Eigen::VectorXd w, we;
  Eigen::MatrixXd V;
  if (!lapack_path(A, w, &V)) return false;
  const double scale = A.norm();
  if ((A * V - V * w.asDiagonal()).norm() > 1e-10 * scale) return false;
  if ((V.transpose() * V - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-10 * n) return false;
  eigen_path(A, we, nullptr);
  return (w - we).cwiseAbs().maxCoeff() <= 1e-10 * scale;
}
#endif

}  // namespace

bool lapack_active() {
#ifdef NPDISKS_HAVE_LAPACK
  static const bool ok = [] {
    const bool pass = self_test();
    if (!pass)
      std::fprintf(stderr,
                   "npdisks: LAPACK dsyevd failed its self-test; using Eigen (for OpenBLAS, try "
                   "OPENBLAS_CORETYPE=Haswell)\n");
    return pass;
  }();
  return ok;
#else
  return false;
#endif
}

void symmetric_eigen(const Eigen::MatrixXd& A, Eigen::VectorXd& values, Eigen::MatrixXd* vectors) {
#ifdef NPDISKS_HAVE_LAPACK
  if (lapack_active()) {
    if (lapack_path(A, values, vectors)) return;
    throw DomainError("symmetric eigensolver failed to converge");
  }
#endif
  eigen_path(A, values, vectors);
}

}  // namespace npdisks::detail
