#pragma once

// Builders for the truncation matrices M_n = Pi_n M Pi_n and
// [M^2]_n = Pi_n M^2 Pi_n of the model operators, plus the nilpotent-shift
// test fixture.
//
// Models:
//  - FourierB1: M = S + K on L^2(-pi,pi) with the normalized inner product
//    (1/2pi)Int, s(x) = -2+sin(2x) on (-pi,0], +2+sin(2x) on (0,pi],
//    K f = 2*fhat(0). Basis e^{ijx}, j = -n..n, dim = 2n+1.
//  - DirectSumB2: the same operator conjugated onto L^2 (+) L^2, symbols
//    -2+sin x and 2+sin x plus the rank-one coupling through G=(1,1)^t.
//    The study index n matches the convergence tables for this model:
//    each component carries a window of n/2+2 consecutive Fourier modes
//    (symmetric when that count is odd), dim = n+4. n must be even, >= 2.
//  - SchrodingerHermite: M = -d^2/dx^2 + V(x) in the Hermite-function basis
//    phi_0..phi_n, dim = n+1. x^2-terms assembled from ladder relations,
//    V-terms by Gauss-Hermite quadrature with a doubling convergence gate.
//  - HarmonicSanity: V(x) = x^2; the basis is the exact eigenbasis and the
//    truncations are diagonal.
//  - ShiftFixture: R_n(z) = (z - S_n)(z - S_n^*) with S_n the
//    subdiagonal-ones matrix; exercises the sigma machinery only.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "sospec/matpoly.hpp"

namespace sospec {
namespace operators {

using matpoly::cxd;
using matpoly::HermitianMatrix;
using matpoly::Matrix;
using matpoly::QuadraticPencil;

struct TruncationPair {
  int n_index;
  HermitianMatrix M;
  HermitianMatrix M2;

  int dim() const { return M.dim(); }
  QuadraticPencil pencil() const {
    return QuadraticPencil(HermitianMatrix(2.0 * M.entries()), M2);
  }
};

enum class ModelKind {
  FourierB1,
  DirectSumB2,
  SchrodingerHermite,
  ShiftFixture,
  HarmonicSanity,
};

struct SpectrumInfo {
  // Disjoint closed essential bands, sorted.
  std::vector<std::pair<double, double>> essential_bands;
  // Known discrete eigenvalues; empty when deferred to the oracle module.
  std::vector<double> discrete_eigenvalues;
  bool discrete_from_oracle = false;
};

struct OperatorModel {
  ModelKind kind = ModelKind::FourierB1;
  // Schrodinger-only fields.
  std::string potential_name;  // "demo", "zero", "harmonic"
  std::function<double(double)> potential;
  int quadrature_order_hint = 0;  // 0 = default 4(n+1)+64

  static OperatorModel fourier_b1();
  static OperatorModel direct_sum_b2();
  static OperatorModel schrodinger(const std::string& potential_name);
  static OperatorModel harmonic_sanity();
  static OperatorModel shift_fixture();

  SpectrumInfo spectrum_info() const;
};

// Fourier data of the B1 symbol: shat(j) = 4/(i j pi) for odd j,
// (delta_{2,j} - delta_{-2,j})/(2i) for even j, 0 at j = 0.
cxd fourier_coeff_s(long j);

// Normalized Fourier coefficients of s(x)^2, from the closed-form
// decomposition s^2 = 4 + 4*sigma(x)*sin(2x) + (1 - cos 4x)/2 with sigma
// the sign function of the symbol's step.
cxd fourier_coeff_s_squared(long j);

// Coefficient table over j = -J..J with conjugate symmetry.
struct FourierCoeffTable {
  long half_width;
  std::vector<cxd> values;  // index j + half_width
  cxd at(long j) const { return values[static_cast<std::size_t>(j + half_width)]; }
};
FourierCoeffTable tabulate_s(long half_width);
FourierCoeffTable tabulate_s_squared(long half_width);

TruncationPair build_b1(const OperatorModel& model, int n);
TruncationPair build_b2(const OperatorModel& model, int n);
TruncationPair build_schrodinger(const OperatorModel& model, int n);
QuadraticPencil build_shift_fixture(int n);

// Dispatch on model.kind; ShiftFixture has no TruncationPair form and is
// rejected here (use build_shift_fixture / pencil_for directly).
TruncationPair build(const OperatorModel& model, int n);

// The pencil for any model kind, including the shift fixture.
QuadraticPencil pencil_for(const OperatorModel& model, int n);

// Gauss-Hermite quadrature against dx (weights already folded with e^{x^2}),
// computed via the Jacobi matrix and Christoffel sums of the weighted
// recurrence; stable for orders in the thousands.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(int order);

// Normalized Hermite functions phi_0..phi_max evaluated at x (weighted
// recurrence, includes the e^{-x^2/2} factor).
std::vector<double> hermite_functions(int max_index, double x);

// B2 window bookkeeping: number of Fourier modes per component and the
// inclusive mode range for study index n.
int b2_modes_per_component(int n);
std::pair<long, long> b2_mode_window(int n);

}  // namespace operators
}  // namespace sospec
