#pragma once

// Quadratic (and general-degree) matrix polynomials with Hermitian
// coefficients: spectra via companion linearization, the spectral function
// sigma_P (smallest singular value of P(z)), weighted pseudospectra and
// rank-one distance witnesses.

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace sospec {
namespace matpoly {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

double inf_norm(const Matrix& a);

// Dense complex square matrix that is Hermitian by construction. Inputs are
// replaced by their Hermitian part (A + A*)/2; the defect ||A - A*||_inf is
// recorded and must not exceed 1e-10 * max(1, ||A||_inf).
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& a);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double defect() const { return defect_; }

 private:
  Matrix entries_;
  double defect_ = 0.0;
};

// Monic Hermitian quadratic P(z) = z^2 I - (2M_n) z + [M^2]_n. linear_coeff
// stores 2*M_n, constant_coeff stores [M^2]_n.
class QuadraticPencil {
 public:
  QuadraticPencil(HermitianMatrix linear_coeff, HermitianMatrix constant_coeff);

  int dim() const { return linear_.dim(); }
  const HermitianMatrix& linear_coeff() const { return linear_; }
  const HermitianMatrix& constant_coeff() const { return constant_; }

  Matrix evaluate(cxd z) const;

  // max(1, ||2M_n||_inf, ||[M^2]_n||_inf); reference for residual tolerances.
  double scale() const;

  // Smallest eigenvalue of the constant coefficient. The compression of a
  // squared self-adjoint operator is positive semidefinite, so this must be
  // >= -1e-10 * scale for a well-formed pencil. O(dim^3); called from tests
  // and validation paths, not from the constructor.
  double constant_coeff_smallest_eigenvalue() const;

 private:
  HermitianMatrix linear_;
  HermitianMatrix constant_;
};

// P(z) = sum_{k=0}^m A_k z^k with det A_m != 0 (checked: smallest singular
// value of A_m > 1e-12). Used by the degree-general spectral-function and
// pseudospectra machinery.
class GeneralPencil {
 public:
  explicit GeneralPencil(std::vector<Matrix> coeffs);
  explicit GeneralPencil(const QuadraticPencil& q);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  int dim() const { return static_cast<int>(coeffs_.front().rows()); }
  const std::vector<Matrix>& coeffs() const { return coeffs_; }

  Matrix evaluate(cxd z) const;
  double scale() const;

 private:
  std::vector<Matrix> coeffs_;
};

struct SpectrumResult {
  std::vector<cxd> eigenvalues;    // 2*dim values with multiplicity
  std::vector<double> residuals;   // upper bounds on sigma_P at each eigenvalue
  double pencil_scale = 1.0;
};

struct PseudospectraWeights {
  std::vector<double> w;  // w_0 ... w_m, all >= 0
};

struct GridRect {
  double re_min, re_max, im_min, im_max;
};

// Block companion matrix [[0, I], [-[M^2]_n, 2M_n]] of size 2*dim; its
// eigenvalue multiset equals Spec P.
Matrix companion_linearize(const QuadraticPencil& pencil);

// All 2*dim eigenvalues of the pencil, residuals populated from the
// companion right eigenvectors as ||P(z)u||/||u||. Throws on eigensolver
// non-convergence (message names the pencil dimension).
SpectrumResult eigenvalues(const QuadraticPencil& pencil);

// sigma_P(z): smallest singular value of P(z). Full SVD for dim <= 512,
// LU-based inverse iteration above.
double spectral_function(const QuadraticPencil& pencil, cxd z);
double spectral_function(const GeneralPencil& pencil, cxd z);
double sigma_min(const Matrix& a);

// z in Spec_{eps,w} P  <=>  sigma_P(z) <= eps * sum_k w_k |z|^k.
bool pseudospectrum_member(const GeneralPencil& pencil, cxd z, double eps,
                           const PseudospectraWeights& weights);

// sigma_P sampled at the centers of an nx x ny cell grid over rect,
// row-major starting from (re_min, im_min). Deterministic for any thread
// count.
std::vector<double> grid_sample(const GeneralPencil& pencil, const GridRect& rect,
                                int nx, int ny, unsigned threads = 1);
std::vector<double> grid_sample(const QuadraticPencil& pencil, const GridRect& rect,
                                int nx, int ny, unsigned threads = 1);

// Rank-one E with ||E|| = sigma_P(z) and P(z)+E singular, built from the
// singular pair of the smallest singular value. Requires sigma_P(z) > 0:
// on the spectrum the minimal perturbation is the zero matrix and the
// request is rejected.
Matrix rank_one_distance_witness(const GeneralPencil& pencil, cxd z);

// Greedy conjugate pairing of the eigenvalue multiset; returns the largest
// relative pair defect max |w - conj(z)| / (1 + |z|). Ties during matching
// are broken by ascending real part.
double conjugate_pairing_defect(const SpectrumResult& spec);

}  // namespace matpoly
}  // namespace sospec
