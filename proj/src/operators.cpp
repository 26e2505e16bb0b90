#include "sospec/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "sospec/lapack_wrap.hpp"

namespace sospec {
namespace operators {

namespace {

constexpr double kPi = std::numbers::pi;
const cxd kI(0.0, 1.0);

double demo_potential(double x) { return -8.0 * std::exp(-x * x) + std::cos(x); }

}  // namespace

OperatorModel OperatorModel::fourier_b1() {
  OperatorModel m;
  m.kind = ModelKind::FourierB1;
  return m;
}

OperatorModel OperatorModel::direct_sum_b2() {
  OperatorModel m;
  m.kind = ModelKind::DirectSumB2;
  return m;
}

OperatorModel OperatorModel::schrodinger(const std::string& potential_name) {
  OperatorModel m;
  m.kind = ModelKind::SchrodingerHermite;
  m.potential_name = potential_name;
  if (potential_name == "demo") {
    m.potential = demo_potential;
  } else if (potential_name == "zero") {
    m.potential = [](double) { return 0.0; };
  } else if (potential_name == "harmonic") {
    m.potential = [](double x) { return x * x; };
  } else {
    throw std::invalid_argument("unknown potential: " + potential_name);
  }
  return m;
}

OperatorModel OperatorModel::harmonic_sanity() {
  OperatorModel m = schrodinger("harmonic");
  m.kind = ModelKind::HarmonicSanity;
  return m;
}

OperatorModel OperatorModel::shift_fixture() {
  OperatorModel m;
  m.kind = ModelKind::ShiftFixture;
  return m;
}

SpectrumInfo OperatorModel::spectrum_info() const {
  SpectrumInfo info;
  switch (kind) {
    case ModelKind::FourierB1:
    case ModelKind::DirectSumB2:
      info.essential_bands = {{-3.0, -1.0}, {1.0, 3.0}};
      info.discrete_from_oracle = true;  // lambda_{+-} from the secular roots
      break;
    case ModelKind::HarmonicSanity:
      for (int k = 0; k < 64; ++k) info.discrete_eigenvalues.push_back(2.0 * k + 1.0);
      break;
    case ModelKind::SchrodingerHermite:
      // Essential bands come from the periodic part of the potential; the
      // discrete eigenvalues below them come from the FD oracle.
      info.discrete_from_oracle = true;
      break;
    case ModelKind::ShiftFixture:
      info.discrete_eigenvalues = {0.0};
      break;
  }
  return info;
}

cxd fourier_coeff_s(long j) {
  if (j % 2 != 0) return 4.0 / (kI * static_cast<double>(j) * kPi);
  if (j == 2) return 1.0 / (2.0 * kI);
  if (j == -2) return -1.0 / (2.0 * kI);
  return 0.0;
}

cxd fourier_coeff_s_squared(long j) {
  // s^2 = 4.5 - cos(4x)/2 + 4 sigma(x) sin(2x); the product term only has
  // odd coefficients, -4/(pi (j^2 - 4)) each, scaled by 4.
  double v = 0.0;
  if (j == 0) v += 4.5;
  if (j == 4 || j == -4) v += -0.25;
  if (j % 2 != 0) {
    double jd = static_cast<double>(j);
    v += -16.0 / (kPi * (jd * jd - 4.0));
  }
  return v;
}

FourierCoeffTable tabulate_s(long half_width) {
  FourierCoeffTable t;
  t.half_width = half_width;
  t.values.reserve(static_cast<std::size_t>(2 * half_width + 1));
  for (long j = -half_width; j <= half_width; ++j) t.values.push_back(fourier_coeff_s(j));
  return t;
}

FourierCoeffTable tabulate_s_squared(long half_width) {
  FourierCoeffTable t;
  t.half_width = half_width;
  t.values.reserve(static_cast<std::size_t>(2 * half_width + 1));
  for (long j = -half_width; j <= half_width; ++j)
    t.values.push_back(fourier_coeff_s_squared(j));
  return t;
}

TruncationPair build_b1(const OperatorModel& model, int n) {
  if (model.kind != ModelKind::FourierB1) {
    throw std::invalid_argument("build_b1: wrong model kind");
  }
  if (n < 0) throw std::invalid_argument("build_b1: n >= 0 required");
  const int d = 2 * n + 1;
  FourierCoeffTable s = tabulate_s(2 * n);
  FourierCoeffTable s2 = tabulate_s_squared(2 * n);

  Matrix M = Matrix::Zero(d, d);
  Matrix M2 = Matrix::Zero(d, d);
  // Row/column a <-> Fourier index j = a - n.
  for (int a = 0; a < d; ++a) {
    long j = a - n;
    for (int b = 0; b < d; ++b) {
      long k = b - n;
      M(a, b) = s.at(j - k);
      cxd v = s2.at(j - k);
      // (S+K)^2 = S^2 + SK + KS + K^2 with K f = 2 fhat(0): the mixed terms
      // border the zero row/column, K^2 is the scalar corner.
      if (k == 0) v += 2.0 * s.at(j);
      if (j == 0) v += 2.0 * std::conj(s.at(k));
      if (j == 0 && k == 0) v += 4.0;
      M2(a, b) = v;
    }
  }
  M(n, n) += 2.0;
  return TruncationPair{n, HermitianMatrix(M), HermitianMatrix(M2)};
}

int b2_modes_per_component(int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("build_b2: even n >= 2 required");
  }
  return n / 2 + 2;
}

std::pair<long, long> b2_mode_window(int n) {
  int w = b2_modes_per_component(n);
  if (w % 2 == 1) {
    long h = (w - 1) / 2;
    return {-h, h};
  }
  long h = w / 2;
  return {-(h - 1), h};
}

namespace {

// Direct-sum symbols: s1 = -2 + sin x, s2 = 2 + sin x.
cxd b2_symbol_coeff(int component, long j) {
  if (j == 0) return component == 0 ? -2.0 : 2.0;
  if (j == 1) return 1.0 / (2.0 * kI);
  if (j == -1) return -1.0 / (2.0 * kI);
  return 0.0;
}

// Coefficients of s_m^2 = 4.5 +- 4 sin x - cos(2x)/2.
cxd b2_symbol_sq_coeff(int component, long j) {
  double sgn = component == 0 ? -1.0 : 1.0;
  if (j == 0) return 4.5;
  if (j == 1) return sgn * 4.0 / (2.0 * kI);
  if (j == -1) return -sgn * 4.0 / (2.0 * kI);
  if (j == 2 || j == -2) return -0.25;
  return 0.0;
}

}  // namespace

TruncationPair build_b2(const OperatorModel& model, int n) {
  if (model.kind != ModelKind::DirectSumB2) {
    throw std::invalid_argument("build_b2: wrong model kind");
  }
  auto [lo, hi] = b2_mode_window(n);
  const int w = static_cast<int>(hi - lo + 1);
  const int d = 2 * w;
  // Interleaved basis e_lo, h_lo, ..., e_hi, h_hi.
  auto slot = [&](long j, int comp) { return 2 * static_cast<int>(j - lo) + comp; };

  Matrix M = Matrix::Zero(d, d);
  Matrix M2 = Matrix::Zero(d, d);
  for (long j = lo; j <= hi; ++j) {
    for (long k = lo; k <= hi; ++k) {
      for (int c = 0; c < 2; ++c) {
        M(slot(j, c), slot(k, c)) = b2_symbol_coeff(c, j - k);
        M2(slot(j, c), slot(k, c)) = b2_symbol_sq_coeff(c, j - k);
      }
    }
  }

  // Rank-one coupling K = <., G> G with G = (1,1)^t; in coordinates
  // g = 1 at e_0 and h_0. (S+K)^2 adds (Sg)g* + g(Sg)* + ||G||^2 g g*.
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(d);
  g[slot(0, 0)] = 1.0;
  g[slot(0, 1)] = 1.0;
  Eigen::VectorXcd sg = Eigen::VectorXcd::Zero(d);
  for (long j = lo; j <= hi; ++j) {
    sg[slot(j, 0)] = b2_symbol_coeff(0, j);
    sg[slot(j, 1)] = b2_symbol_coeff(1, j);
  }
  M += g * g.adjoint();
  M2 += sg * g.adjoint() + g * sg.adjoint() + 2.0 * (g * g.adjoint());

  return TruncationPair{n, HermitianMatrix(M), HermitianMatrix(M2)};
}

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order >= 1");
  // Nodes: eigenvalues of the Jacobi matrix (zero diagonal, off-diagonal
  // sqrt(k/2)).
  std::vector<double> diag(static_cast<std::size_t>(order), 0.0);
  std::vector<double> off(static_cast<std::size_t>(order > 1 ? order - 1 : 0));
  for (int k = 1; k < order; ++k) off[static_cast<std::size_t>(k - 1)] = std::sqrt(k / 2.0);
  GaussHermiteRule rule;
  rule.nodes = la::tridiag_eigenvalues(std::move(diag), std::move(off), 1, order);
  rule.weights.resize(static_cast<std::size_t>(order));
  // Total weights against dx via the Christoffel sum of the *weighted*
  // orthonormal functions: w_i e^{x_i^2} = 1 / sum_k phi_k(x_i)^2. Working
  // with the weighted recurrence keeps every intermediate O(1) even for
  // orders in the thousands. Far-tail nodes where every phi_k underflows
  // cannot contribute to any integral; their weight is set to zero instead
  // of the 1/0 the sum would give.
  for (int i = 0; i < order; ++i) {
    double x = rule.nodes[static_cast<std::size_t>(i)];
    std::vector<double> phi = hermite_functions(order - 1, x);
    double s = 0.0;
    for (double p : phi) s += p * p;
    rule.weights[static_cast<std::size_t>(i)] = s > 1e-280 ? 1.0 / s : 0.0;
  }
  return rule;
}

std::vector<double> hermite_functions(int max_index, double x) {
  std::vector<double> phi(static_cast<std::size_t>(max_index + 1));
  double p0 = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  phi[0] = p0;
  if (max_index >= 1) phi[1] = std::sqrt(2.0) * x * p0;
  for (int k = 1; k < max_index; ++k) {
    phi[static_cast<std::size_t>(k + 1)] =
        std::sqrt(2.0 / (k + 1.0)) * x * phi[static_cast<std::size_t>(k)] -
        std::sqrt(k / (k + 1.0)) * phi[static_cast<std::size_t>(k - 1)];
  }
  return phi;
}

namespace {

// Assembles M_n and [M^2]_n at a fixed quadrature order. The x^2 matrix
// comes from the ladder relations; only V-dependent terms are quadrature.
void assemble_hermite(const std::function<double(double)>& V, int n, int order,
                      Eigen::MatrixXd* M_out, Eigen::MatrixXd* M2_out) {
  const int d = n + 1;
  GaussHermiteRule rule = gauss_hermite(order);
  const int nq = static_cast<int>(rule.nodes.size());

  // phi_k(x_i) for k = 0..n; row i, col k.
  Eigen::MatrixXd phi(nq, d);
  for (int i = 0; i < nq; ++i) {
    auto col = hermite_functions(n, rule.nodes[static_cast<std::size_t>(i)]);
    for (int k = 0; k < d; ++k) phi(i, k) = col[static_cast<std::size_t>(k)];
  }

  // M phi_k = (2k+1) phi_k - x^2 phi_k + V phi_k evaluated on the nodes.
  Eigen::MatrixXd mphi(nq, d);
  for (int i = 0; i < nq; ++i) {
    double x = rule.nodes[static_cast<std::size_t>(i)];
    double c = V(x) - x * x;
    for (int k = 0; k < d; ++k) {
      mphi(i, k) = (2.0 * k + 1.0 + c) * phi(i, k);
    }
  }

  Eigen::VectorXd wts(nq);
  for (int i = 0; i < nq; ++i) wts[i] = rule.weights[static_cast<std::size_t>(i)];

  // [M^2]_{jk} = <M phi_k, M phi_j>, all by quadrature.
  *M2_out = mphi.transpose() * wts.asDiagonal() * mphi;

  // M_n: ladder x^2 matrix plus quadrature for the V term.
  Eigen::MatrixXd x2 = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    x2(k, k) = (2.0 * k + 1.0) / 2.0;
    if (k + 2 < d) {
      double v = std::sqrt((k + 1.0) * (k + 2.0)) / 2.0;
      x2(k, k + 2) = v;
      x2(k + 2, k) = v;
    }
  }
  Eigen::MatrixXd vmat(d, d);
  {
    Eigen::MatrixXd vphi(nq, d);
    for (int i = 0; i < nq; ++i) {
      double vx = V(rule.nodes[static_cast<std::size_t>(i)]);
      for (int k = 0; k < d; ++k) vphi(i, k) = vx * phi(i, k);
    }
    vmat = phi.transpose() * wts.asDiagonal() * vphi;
  }
  Eigen::MatrixXd M = -x2 + vmat;
  for (int k = 0; k < d; ++k) M(k, k) += 2.0 * k + 1.0;
  *M_out = M;
}

}  // namespace

TruncationPair build_schrodinger(const OperatorModel& model, int n) {
  if (model.kind != ModelKind::SchrodingerHermite &&
      model.kind != ModelKind::HarmonicSanity) {
    throw std::invalid_argument("build_schrodinger: wrong model kind");
  }
  if (n < 0) throw std::invalid_argument("build_schrodinger: n >= 0 required");
  if (!model.potential) throw std::invalid_argument("build_schrodinger: no potential");

  int order = model.quadrature_order_hint > 0 ? model.quadrature_order_hint
                                              : 4 * (n + 1) + 64;
  Eigen::MatrixXd M, M2, Md, M2d;
  assemble_hermite(model.potential, n, order, &M, &M2);
  // Convergence gate: doubling the order must leave every entry within 1e-8.
  for (int round = 0;; ++round) {
    assemble_hermite(model.potential, n, 2 * order, &Md, &M2d);
    double delta = std::max((M - Md).cwiseAbs().maxCoeff(),
                            (M2 - M2d).cwiseAbs().maxCoeff());
    if (delta <= 1e-8) break;
    if (round >= 3) {
      throw std::runtime_error(
          "build_schrodinger: Gauss-Hermite quadrature did not converge at order " +
          std::to_string(2 * order) + " (entry change " + std::to_string(delta) + ")");
    }
    order *= 2;
    M = Md;
    M2 = M2d;
  }
  return TruncationPair{n, HermitianMatrix(Md.cast<cxd>()),
                        HermitianMatrix(M2d.cast<cxd>())};
}

QuadraticPencil build_shift_fixture(int n) {
  if (n < 1) throw std::invalid_argument("build_shift_fixture: n >= 1 required");
  Matrix s = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) s(i, i - 1) = 1.0;
  Matrix lin = s + s.adjoint();
  Matrix con = s * s.adjoint();
  return QuadraticPencil(HermitianMatrix(lin), HermitianMatrix(con));
}

TruncationPair build(const OperatorModel& model, int n) {
  switch (model.kind) {
    case ModelKind::FourierB1:
      return build_b1(model, n);
    case ModelKind::DirectSumB2:
      return build_b2(model, n);
    case ModelKind::SchrodingerHermite:
    case ModelKind::HarmonicSanity:
      return build_schrodinger(model, n);
    case ModelKind::ShiftFixture:
      throw std::invalid_argument(
          "build: shift fixture is a pencil, not a truncation pair");
  }
  throw std::logic_error("build: unreachable");
}

QuadraticPencil pencil_for(const OperatorModel& model, int n) {
  if (model.kind == ModelKind::ShiftFixture) return build_shift_fixture(n);
  return build(model, n).pencil();
}

}  // namespace operators
}  // namespace sospec
