#pragma once

// Dense symmetric eigensolver.  Uses LAPACK dsyevd when the build links it
// and a one-time self-test on this machine passes; Eigen otherwise.

#include <Eigen/Dense>

namespace npdisks::detail {

/// Ascending eigenvalues of the symmetric matrix A (lower triangle is read).
/// Eigenvectors go to `vectors` when it is non-null.
void symmetric_eigen(const Eigen::MatrixXd& A, Eigen::VectorXd& values, Eigen::MatrixXd* vectors);

/// True when the LAPACK path is compiled in and passed its self-test.
bool lapack_active();

}  // namespace npdisks::detail
