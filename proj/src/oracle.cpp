#include "sospec/oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sospec/lapack_wrap.hpp"

namespace sospec {
namespace oracle {

namespace {

constexpr double kPi = std::numbers::pi;
const cxd kI(0.0, 1.0);

bool in_band(double lambda) {
  return (lambda >= -3.0 && lambda <= -1.0) || (lambda >= 1.0 && lambda <= 3.0);
}

// Brent root finding; f(a) and f(b) must have opposite signs.
template <typename F>
double brent(F f, double a, double b, double fa, double fb) {
  if (fa * fb > 0.0) throw std::runtime_error("brent: no sign change in bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 1e-15;
    double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = m; e = m;
    } else {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d; d = p / q;
      } else {
        d = m; e = m;
      }
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; d = b - a; e = d;
    }
  }
  return b;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol);
}

cxd integrate_complex(const std::function<cxd(double)>& f, double a, double b,
                      double tol) {
  double re = integrate([&](double x) { return f(x).real(); }, a, b, tol);
  double im = integrate([&](double x) { return f(x).imag(); }, a, b, tol);
  return {re, im};
}

double secular_function(double lambda) {
  if (in_band(lambda)) {
    throw std::invalid_argument("secular_function: lambda inside an essential band");
  }
  auto branch = [](double c) {
    return (c > 0 ? 1.0 : -1.0) * kPi / std::sqrt(c * c - 1.0);
  };
  return branch(lambda + 2.0) + branch(lambda - 2.0) - kPi;
}

double secular_function_quadrature(double lambda) {
  if (in_band(lambda)) {
    throw std::invalid_argument("secular_function: lambda inside an essential band");
  }
  double i1 = integrate(
      [lambda](double x) { return 1.0 / ((lambda + 2.0) - std::sin(2.0 * x)); }, -kPi,
      0.0);
  double i2 = integrate(
      [lambda](double x) { return 1.0 / ((lambda - 2.0) - std::sin(2.0 * x)); }, 0.0,
      kPi);
  return i1 + i2 - kPi;
}

SecularSolution secular_roots() {
  SecularSolution sol{};
  {
    double a = -1.0 + 1e-9, b = 1.0 - 1e-9;
    double fa = secular_function(a), fb = secular_function(b);
    sol.bracket_minus = {a, b, fa, fb};
    sol.lambda_minus = brent([](double x) { return secular_function(x); }, a, b, fa, fb);
    sol.residual_minus = std::abs(secular_function(sol.lambda_minus));
  }
  {
    double a = 3.0 + 1e-9, b = 20.0;
    double fa = secular_function(a), fb = secular_function(b);
    sol.bracket_plus = {a, b, fa, fb};
    sol.lambda_plus = brent([](double x) { return secular_function(x); }, a, b, fa, fb);
    sol.residual_plus = std::abs(secular_function(sol.lambda_plus));
  }
  if (sol.residual_minus > 1e-12 || sol.residual_plus > 1e-12) {
    throw std::runtime_error("secular_roots: residual above 1e-12");
  }
  return sol;
}

namespace {

// The B1 multiplication-plus-rank-one operator applied to e^{ikx},
// evaluated pointwise: (M e_k)(x) = s(x) e^{ikx} + 2 delta_{k0}.
cxd b1_apply(long k, double x) {
  double s = (x <= 0.0 ? -2.0 : 2.0) + std::sin(2.0 * x);
  cxd v = s * std::exp(kI * static_cast<double>(k) * x);
  if (k == 0) v += 2.0;
  return v;
}

// Component c of M applied to a basis element of the direct-sum model:
// basis (k, comp) is e_k for comp=0, h_k for comp=1.
// (M b)(x) = s_c(x) [b]_c(x) + <b, G> where <b,G> = delta_{k0}.
cxd b2_apply(long k, int comp, int out_comp, double x) {
  cxd v = 0.0;
  if (comp == out_comp) {
    double s = (out_comp == 0 ? -2.0 : 2.0) + std::sin(x);
    v += s * std::exp(kI * static_cast<double>(k) * x);
  }
  if (k == 0) v += 1.0;  // <b, G> G spreads 1 into both components
  return v;
}

}  // namespace

std::pair<cxd, cxd> entry_quadrature_oracle(const operators::OperatorModel& model,
                                            int n, int j, int k) {
  using operators::ModelKind;
  if (n > 16) throw std::invalid_argument("entry_quadrature_oracle: n <= 16 only");

  auto norm_int = [](const std::function<cxd(double)>& f, double a, double b) {
    return integrate_complex(f, a, b) / (2.0 * kPi);
  };

  if (model.kind == ModelKind::FourierB1) {
    long jj = j - n, kk = k - n;  // row/col -> Fourier index
    cxd m = 0.0, m2 = 0.0;
    for (auto [a, b] : {std::pair{-kPi, 0.0}, std::pair{0.0, kPi}}) {
      m += norm_int(
          [&](double x) {
            return b1_apply(kk, x) * std::exp(-kI * static_cast<double>(jj) * x);
          },
          a, b);
      m2 += norm_int(
          [&](double x) { return b1_apply(kk, x) * std::conj(b1_apply(jj, x)); }, a, b);
    }
    return {m, m2};
  }

  if (model.kind == ModelKind::DirectSumB2) {
    auto [lo, hi] = operators::b2_mode_window(n);
    (void)hi;
    // Interleaved slot -> (mode, component).
    long kj = lo + j / 2;
    int cj = static_cast<int>(j % 2);
    long kk = lo + k / 2;
    int ck = static_cast<int>(k % 2);
    cxd m = 0.0, m2 = 0.0;
    for (int c = 0; c < 2; ++c) {
      m += norm_int(
          [&](double x) {
            cxd bj = (c == cj) ? std::exp(kI * static_cast<double>(kj) * x) : cxd(0.0);
            return b2_apply(kk, ck, c, x) * std::conj(bj);
          },
          -kPi, kPi);
      m2 += norm_int(
          [&](double x) {
            return b2_apply(kk, ck, c, x) * std::conj(b2_apply(kj, cj, c, x));
          },
          -kPi, kPi);
    }
    return {m, m2};
  }

  if (model.kind == ModelKind::SchrodingerHermite ||
      model.kind == ModelKind::HarmonicSanity) {
    const double X = 14.0;  // phi_j for j <= 16 is below 1e-40 outside
    auto mphi = [&](int idx, double x) {
      auto phi = operators::hermite_functions(n, x);
      return (2.0 * idx + 1.0 - x * x + model.potential(x)) *
             phi[static_cast<std::size_t>(idx)];
    };
    double m = integrate(
        [&](double x) {
          auto phi = operators::hermite_functions(n, x);
          return mphi(k, x) * phi[static_cast<std::size_t>(j)];
        },
        -X, X);
    double m2 = integrate([&](double x) { return mphi(k, x) * mphi(j, x); }, -X, X);
    return {cxd(m), cxd(m2)};
  }

  throw std::invalid_argument("entry_quadrature_oracle: unsupported model kind");
}

std::vector<double> fd_single_grid(const std::function<double(double)>& V, double L,
                                   int N, int count) {
  if (L <= 0.0 || N < 100) throw std::invalid_argument("fd_single_grid: L > 0, N >= 100");
  if (count < 1 || count > N) throw std::invalid_argument("fd_single_grid: bad count");
  double h = 2.0 * L / (N + 1);
  std::vector<double> diag(static_cast<std::size_t>(N));
  std::vector<double> off(static_cast<std::size_t>(N > 1 ? N - 1 : 0), -1.0 / (h * h));
  for (int i = 0; i < N; ++i) {
    double x = -L + (i + 1) * h;
    diag[static_cast<std::size_t>(i)] = 2.0 / (h * h) + V(x);
  }
  return la::tridiag_eigenvalues(std::move(diag), std::move(off), 1, count);
}

FdResult schrodinger_fd(const std::function<double(double)>& V, double L, int N,
                        int count) {
  auto richardson = [&](double LL, int NN) {
    auto c = fd_single_grid(V, LL, NN, count);
    auto f = fd_single_grid(V, LL, 2 * NN, count);
    std::vector<double> r(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) r[i] = (4.0 * f[i] - c[i]) / 3.0;
    return r;
  };
  FdResult res;
  std::vector<double> prev = richardson(L, N);
  for (int round = 0; round < 3; ++round) {
    L *= 1.5;
    N *= 2;
    std::vector<double> next = richardson(L, N);
    double delta = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      delta = std::max(delta, std::abs(next[i] - prev[i]));
    }
    res.values = next;
    res.L_final = L;
    res.N_final = N;
    if (delta < 1e-6) {
      res.converged = true;
      return res;
    }
    prev = std::move(next);
  }
  res.converged = false;
  return res;
}

}  // namespace oracle
}  // namespace sospec
