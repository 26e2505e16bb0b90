#pragma once

// Reference spectra computed independently of the projection method:
// the secular equation of the multiplication-plus-rank-one model in closed
// form (validated against adaptive quadrature), a brute-force entry oracle
// for the truncation builders, and a finite-difference Schrodinger solver.

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "sospec/operators.hpp"

namespace sospec {
namespace oracle {

using matpoly::cxd;

struct Bracket {
  double lo, hi;
  double f_lo, f_hi;
};

struct SecularSolution {
  double lambda_minus;
  double lambda_plus;
  double residual_minus;
  double residual_plus;
  Bracket bracket_minus;
  Bracket bracket_plus;
};

// g(lambda) = Int_{-pi}^0 dx/((lambda+2)-sin 2x)
//           + Int_0^pi  dx/((lambda-2)-sin 2x) - pi,
// evaluated in closed form
//   pi*sgn(lambda+2)/sqrt((lambda+2)^2-1)
// + pi*sgn(lambda-2)/sqrt((lambda-2)^2-1) - pi.
// Rejects lambda inside the essential bands [-3,-1] u [1,3].
double secular_function(double lambda);

// Same quantity by adaptive Gauss-Kronrod quadrature of the defining
// integrals; the two routes must agree to 1e-10 on the resolvent set.
double secular_function_quadrature(double lambda);

// Brent root finding on (-1,1) and (3,20); residuals below 1e-12 with the
// bracketing certificates stored.
SecularSolution secular_roots();

// <M phi_k, phi_j> and <M phi_k, M phi_j> by dense adaptive quadrature
// straight from the operator definition (no Fourier/ladder shortcuts).
// Slow by design; n <= 16.
std::pair<cxd, cxd> entry_quadrature_oracle(const operators::OperatorModel& model,
                                            int n, int j, int k);

// Lowest `count` eigenvalues of the 3-point finite-difference discretization
// of -d^2/dx^2 + V on [-L, L] with Dirichlet ends, N interior points.
std::vector<double> fd_single_grid(const std::function<double(double)>& V,
                                   double L, int N, int count);

struct FdResult {
  std::vector<double> values;
  bool converged = false;
  double L_final = 0.0;
  int N_final = 0;
};

// Grid-doubling extrapolated FD eigenvalues with the convergence gate:
// doubling N and growing L by 50% must change each value by < 1e-6,
// escalating up to three rounds; non-convergence is reported, not thrown.
FdResult schrodinger_fd(const std::function<double(double)>& V, double L, int N,
                        int count);

// Adaptive Gauss-Kronrod integration helpers used by the oracles.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);
cxd integrate_complex(const std::function<cxd(double)>& f, double a, double b,
                      double tol = 1e-12);

}  // namespace oracle
}  // namespace sospec
