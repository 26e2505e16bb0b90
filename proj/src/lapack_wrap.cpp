#include "sospec/lapack_wrap.hpp"

#include <lapacke.h>

#include <mutex>
#include <stdexcept>
#include <string>

extern "C" void openblas_set_num_threads(int);

namespace sospec {
namespace la {

namespace {

void ensure_sequential_blas() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

lapack_complex_double* ptr(Matrix& m) {
  return reinterpret_cast<lapack_complex_double*>(m.data());
}

}  // namespace

std::vector<std::complex<double>> eigenvalues_general(const Matrix& a,
                                                      Matrix* right_vectors) {
  ensure_sequential_blas();
  const int n = static_cast<int>(a.rows());
  Matrix work = a;  // zgeev overwrites
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  Matrix vr;
  char jobvr = 'N';
  if (right_vectors) {
    vr.resize(n, n);
    jobvr = 'V';
  }
  int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', jobvr, n, ptr(work), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
      right_vectors ? ptr(vr) : nullptr, right_vectors ? n : 1);
  if (info != 0) {
    throw std::runtime_error("zgeev failed (info=" + std::to_string(info) +
                             ") for matrix dimension " + std::to_string(n));
  }
  if (right_vectors) *right_vectors = std::move(vr);
  return w;
}

std::vector<double> singular_values(const Matrix& a) {
  ensure_sequential_blas();
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  Matrix work = a;
  std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
  std::vector<double> superb(static_cast<std::size_t>(std::min(m, n)));
  int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', m, n, ptr(work), m,
                            s.data(), nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) {
    throw std::runtime_error("zgesvd failed (info=" + std::to_string(info) +
                             ") for matrix dimension " + std::to_string(n));
  }
  return s;
}

SingularTriplet smallest_singular_triplet(const Matrix& a) {
  ensure_sequential_blas();
  const int n = static_cast<int>(a.rows());
  Matrix work = a;
  std::vector<double> s(static_cast<std::size_t>(n));
  std::vector<double> superb(static_cast<std::size_t>(n));
  Matrix u(n, n), vt(n, n);
  int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'A', 'A', n, n, ptr(work), n,
                            s.data(), ptr(u), n, ptr(vt), n, superb.data());
  if (info != 0) {
    throw std::runtime_error("zgesvd failed (info=" + std::to_string(info) +
                             ") for matrix dimension " + std::to_string(n));
  }
  SingularTriplet t;
  t.sigma = s.back();
  t.u = u.col(n - 1);
  t.v = vt.row(n - 1).adjoint();  // columns of V
  return t;
}

std::vector<double> tridiag_eigenvalues(std::vector<double> diag,
                                        std::vector<double> offdiag,
                                        int il, int iu) {
  ensure_sequential_blas();
  const int n = static_cast<int>(diag.size());
  if (n <= 0 || il < 1 || iu > n || il > iu) {
    throw std::invalid_argument("tridiag_eigenvalues: bad index range");
  }
  int m = 0;
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * std::max(1, iu - il + 1)));
  int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'I', n, diag.data(),
                            offdiag.data(), 0.0, 0.0, il, iu, 0.0, &m, w.data(),
                            nullptr, 1, isuppz.data());
  if (info != 0) {
    throw std::runtime_error("dstevr failed (info=" + std::to_string(info) + ")");
  }
  w.resize(static_cast<std::size_t>(m));
  return w;
}

std::vector<double> hermitian_eigenvalues(const Matrix& a) {
  ensure_sequential_blas();
  const int n = static_cast<int>(a.rows());
  Matrix work = a;
  std::vector<double> w(static_cast<std::size_t>(n));
  int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'L', n, ptr(work), n, w.data());
  if (info != 0) {
    throw std::runtime_error("zheev failed (info=" + std::to_string(info) +
                             ") for matrix dimension " + std::to_string(n));
  }
  return w;
}

}  // namespace la
}  // namespace sospec
