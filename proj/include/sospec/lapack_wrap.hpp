#pragma once

// Thin covers for the LAPACK routines used by this project, so the rest of
// the code never touches lapacke.h directly. All wrappers force a
// single-threaded BLAS on first use: results must not depend on how many
// worker threads the caller runs.

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace sospec {
namespace la {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Eigenvalues of a general complex matrix (zgeev). Throws std::runtime_error
// on non-convergence. If right_vectors is non-null it receives the (unit
// 2-norm) right eigenvectors, one column per eigenvalue.
std::vector<std::complex<double>> eigenvalues_general(const Matrix& a,
                                                      Matrix* right_vectors = nullptr);

// All singular values of a complex matrix, descending (zgesvd).
std::vector<double> singular_values(const Matrix& a);

// Smallest singular value together with its left/right singular pair.
struct SingularTriplet {
  double sigma = 0.0;
  Vector u;
  Vector v;
};
SingularTriplet smallest_singular_triplet(const Matrix& a);

// Eigenvalues il..iu (1-based, ascending) of a real symmetric tridiagonal
// matrix (dstevr).
std::vector<double> tridiag_eigenvalues(std::vector<double> diag,
                                        std::vector<double> offdiag,
                                        int il, int iu);

// All eigenvalues of a Hermitian matrix, ascending (zheev).
std::vector<double> hermitian_eigenvalues(const Matrix& a);

}  // namespace la
}  // namespace sospec
