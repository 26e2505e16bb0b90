#include "sospec/matpoly.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "sospec/lapack_wrap.hpp"
#include "sospec/parallel.hpp"

namespace sospec {
namespace matpoly {

namespace {
constexpr double kHermitianDefectTol = 1e-10;
constexpr int kFullSvdMaxDim = 512;
}  // namespace

double inf_norm(const Matrix& a) {
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

HermitianMatrix::HermitianMatrix(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw std::invalid_argument("HermitianMatrix: square matrix of dim >= 1 required");
  }
  defect_ = inf_norm(a - a.adjoint());
  double scale = std::max(1.0, inf_norm(a));
  if (defect_ > kHermitianDefectTol * scale) {
    throw std::invalid_argument("HermitianMatrix: defect " + std::to_string(defect_) +
                                " exceeds tolerance");
  }
  entries_ = 0.5 * (a + a.adjoint());
}

QuadraticPencil::QuadraticPencil(HermitianMatrix linear_coeff,
                                 HermitianMatrix constant_coeff)
    : linear_(std::move(linear_coeff)), constant_(std::move(constant_coeff)) {
  if (linear_.dim() != constant_.dim()) {
    throw std::invalid_argument("QuadraticPencil: coefficient dimensions differ");
  }
}

Matrix QuadraticPencil::evaluate(cxd z) const {
  const int d = dim();
  Matrix r = constant_.entries() - z * linear_.entries();
  r += (z * z) * Matrix::Identity(d, d);
  return r;
}

double QuadraticPencil::scale() const {
  return std::max({1.0, inf_norm(linear_.entries()), inf_norm(constant_.entries())});
}

double QuadraticPencil::constant_coeff_smallest_eigenvalue() const {
  return la::hermitian_eigenvalues(constant_.entries()).front();
}

GeneralPencil::GeneralPencil(std::vector<Matrix> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("GeneralPencil: no coefficients");
  const auto rows = coeffs_.front().rows();
  for (const auto& c : coeffs_) {
    if (c.rows() != rows || c.cols() != rows) {
      throw std::invalid_argument("GeneralPencil: coefficients must be square, equal dims");
    }
  }
  auto sv = la::singular_values(coeffs_.back());
  if (sv.back() <= 1e-12) {
    throw std::invalid_argument("GeneralPencil: leading coefficient is singular");
  }
}

GeneralPencil::GeneralPencil(const QuadraticPencil& q) {
  coeffs_.push_back(q.constant_coeff().entries());
  coeffs_.push_back(-q.linear_coeff().entries());
  coeffs_.push_back(Matrix::Identity(q.dim(), q.dim()));
}

Matrix GeneralPencil::evaluate(cxd z) const {
  // Horner from the leading coefficient.
  Matrix r = coeffs_.back();
  for (int k = degree() - 1; k >= 0; --k) {
    r = z * r + coeffs_[static_cast<std::size_t>(k)];
  }
  return r;
}

double GeneralPencil::scale() const {
  double s = 1.0;
  for (const auto& c : coeffs_) s = std::max(s, inf_norm(c));
  return s;
}

Matrix companion_linearize(const QuadraticPencil& pencil) {
  const int d = pencil.dim();
  Matrix c = Matrix::Zero(2 * d, 2 * d);
  c.block(0, d, d, d) = Matrix::Identity(d, d);
  c.block(d, 0, d, d) = -pencil.constant_coeff().entries();
  c.block(d, d, d, d) = pencil.linear_coeff().entries();
  return c;
}

SpectrumResult eigenvalues(const QuadraticPencil& pencil) {
  const int d = pencil.dim();
  Matrix vr;
  std::vector<cxd> w;
  try {
    w = la::eigenvalues_general(companion_linearize(pencil), &vr);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("pencil eigensolve did not converge (dim " +
                             std::to_string(d) + "): " + e.what());
  }

  SpectrumResult out;
  out.eigenvalues = std::move(w);
  out.pencil_scale = pencil.scale();
  out.residuals.resize(out.eigenvalues.size());
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
    // Companion eigenvector is (u, z u); either block spans the pencil
    // eigenvector. ||P(z)u|| / ||u|| is an upper bound for sigma_P(z).
    Eigen::VectorXcd top = vr.col(static_cast<Eigen::Index>(i)).head(d);
    Eigen::VectorXcd bot = vr.col(static_cast<Eigen::Index>(i)).tail(d);
    const Eigen::VectorXcd& u = (top.norm() >= bot.norm()) ? top : bot;
    out.residuals[i] = (pencil.evaluate(out.eigenvalues[i]) * u).norm() / u.norm();
  }
  return out;
}

double sigma_min(const Matrix& a) {
  const int d = static_cast<int>(a.rows());
  if (d <= kFullSvdMaxDim) {
    return la::singular_values(a).back();
  }
  // Inverse iteration on (A A*)^{-1} via an LU factorization of A. If A is
  // numerically singular the LU solve degenerates; fall back to 0 when the
  // iterate blows past 1/eps scaled by ||A||.
  Eigen::PartialPivLU<Matrix> lu(a);
  double anorm = inf_norm(a);
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v[i] = cxd(g(rng), g(rng));
  v.normalize();
  double inv_sigma = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXcd y = lu.solve(v);
    Eigen::VectorXcd x = lu.adjoint().solve(y);
    double norm = x.norm();
    if (!std::isfinite(norm) || norm > 1e300) return 0.0;
    double next = std::sqrt(norm);
    v = x / norm;
    if (it > 2 && std::abs(next - inv_sigma) <= 1e-12 * next) {
      inv_sigma = next;
      break;
    }
    inv_sigma = next;
  }
  if (inv_sigma <= 0.0) return 0.0;
  double sigma = 1.0 / inv_sigma;
  return sigma < 1e-280 * anorm ? 0.0 : sigma;
}

double spectral_function(const QuadraticPencil& pencil, cxd z) {
  return sigma_min(pencil.evaluate(z));
}

double spectral_function(const GeneralPencil& pencil, cxd z) {
  return sigma_min(pencil.evaluate(z));
}

bool pseudospectrum_member(const GeneralPencil& pencil, cxd z, double eps,
                           const PseudospectraWeights& weights) {
  if (static_cast<int>(weights.w.size()) != pencil.degree() + 1) {
    throw std::invalid_argument("pseudospectrum_member: need one weight per coefficient");
  }
  double wsum = 0.0;
  bool any = false;
  double p = 1.0;
  for (double wk : weights.w) {
    if (wk < 0.0) throw std::invalid_argument("pseudospectrum_member: negative weight");
    if (wk > 0.0) any = true;
    wsum += wk * p;
    p *= std::abs(z);
  }
  if (eps > 0.0 && !any) {
    throw std::invalid_argument("pseudospectrum_member: weights all zero with eps > 0");
  }
  // The residual allowance makes eps = 0 reduce to spectrum membership at
  // the residual tolerance instead of demanding an exact floating-point zero.
  return spectral_function(pencil, z) <= eps * wsum + 1e-8 * pencil.scale();
}

std::vector<double> grid_sample(const GeneralPencil& pencil, const GridRect& rect,
                                int nx, int ny, unsigned threads) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid_sample: resolution >= 2 required");
  if (!(rect.re_max > rect.re_min) || !(rect.im_max > rect.im_min)) {
    throw std::invalid_argument("grid_sample: degenerate rectangle");
  }
  const double dre = (rect.re_max - rect.re_min) / nx;
  const double dim = (rect.im_max - rect.im_min) / ny;
  std::vector<double> out(static_cast<std::size_t>(nx) * ny);
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    int iy = static_cast<int>(idx) / nx;
    int ix = static_cast<int>(idx) % nx;
    cxd z(rect.re_min + (ix + 0.5) * dre, rect.im_min + (iy + 0.5) * dim);
    out[idx] = spectral_function(pencil, z);
  });
  return out;
}

std::vector<double> grid_sample(const QuadraticPencil& pencil, const GridRect& rect,
                                int nx, int ny, unsigned threads) {
  return grid_sample(GeneralPencil(pencil), rect, nx, ny, threads);
}

Matrix rank_one_distance_witness(const GeneralPencil& pencil, cxd z) {
  Matrix pz = pencil.evaluate(z);
  auto t = la::smallest_singular_triplet(pz);
  if (t.sigma <= 1e-14 * pencil.scale()) {
    throw std::invalid_argument(
        "rank_one_distance_witness: z is in the spectrum; the minimal "
        "perturbation is the zero matrix");
  }
  // P(z) v = sigma u, so E = -sigma u v* makes (P(z)+E) v = 0.
  return -t.sigma * (t.u * t.v.adjoint());
}

double conjugate_pairing_defect(const SpectrumResult& spec) {
  std::vector<cxd> ev = spec.eigenvalues;
  std::sort(ev.begin(), ev.end(), [](cxd a, cxd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::vector<bool> used(ev.size(), false);
  double worst = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    cxd want = std::conj(ev[i]);
    std::size_t best = ev.size();
    double best_d = 0.0;
    for (std::size_t j = 0; j < ev.size(); ++j) {
      // j == i stays admissible: a real eigenvalue pairs with itself.
      if (used[j] && j != i) continue;
      double dist = std::abs(ev[j] - want);
      if (best == ev.size() || dist < best_d ||
          (dist == best_d && ev[j].real() < ev[best].real())) {
        best = j;
        best_d = dist;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d / (1.0 + std::abs(ev[i])));
  }
  return worst;
}

}  // namespace matpoly
}  // namespace sospec
