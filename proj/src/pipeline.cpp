#include "sospec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "sospec/lapack_wrap.hpp"
#include "sospec/parallel.hpp"

namespace sospec {
namespace pipeline {

cxd nearest_eigenvalue(const SpectrumResult& spec, double target) {
  if (spec.eigenvalues.empty()) {
    throw std::invalid_argument("nearest_eigenvalue: empty spectrum");
  }
  cxd best = spec.eigenvalues.front();
  double best_d = std::abs(best - target);
  for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i) {
    cxd z = spec.eigenvalues[i];
    double d = std::abs(z - target);
    bool take = d < best_d;
    if (d == best_d) {
      // Tie: prefer nonnegative imaginary part, then ascending real part.
      bool z_nn = z.imag() >= 0.0, b_nn = best.imag() >= 0.0;
      if (z_nn != b_nn) {
        take = z_nn;
      } else {
        take = z.real() < best.real();
      }
    }
    if (take) {
      best = z;
      best_d = d;
    }
  }
  return best;
}

std::vector<Enclosure> enclosures(const SpectrumResult& spec, double imag_cut) {
  if (imag_cut < 0.0) throw std::invalid_argument("enclosures: imag_cut >= 0 required");
  std::vector<Enclosure> out;
  for (cxd z : spec.eigenvalues) {
    double im = std::abs(z.imag());
    if (im <= imag_cut) {
      out.push_back(Enclosure{z.real() - im, z.real() + im, z});
    }
  }
  std::sort(out.begin(), out.end(), [](const Enclosure& a, const Enclosure& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    if (a.hi != b.hi) return a.hi < b.hi;
    return a.witness.real() < b.witness.real();
  });
  return out;
}

std::vector<ConvergenceRecord> convergence_study(const operators::OperatorModel& model,
                                                 double lambda_ref,
                                                 const std::vector<int>& ns,
                                                 unsigned threads) {
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] <= ns[i - 1]) {
      throw std::invalid_argument("convergence_study: ns must be strictly increasing");
    }
  }
  std::vector<ConvergenceRecord> recs(ns.size());
  std::vector<std::string> errors(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) {
    int n = ns[i];
    try {
      auto pencil = operators::pencil_for(model, n);
      auto spec = matpoly::eigenvalues(pencil);
      cxd z = nearest_eigenvalue(spec, lambda_ref);
      ConvergenceRecord r;
      r.n = n;
      r.z_n = z;
      r.err = std::abs(z - lambda_ref);
      r.log_err = std::log(r.err);
      r.log_n = std::log(static_cast<double>(n));
      recs[i] = r;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!errors[i].empty()) {
      throw std::runtime_error("convergence_study at n=" + std::to_string(ns[i]) +
                               ": " + errors[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    recs[i].slope =
        (recs[i + 1].log_err - recs[i].log_err) / (recs[i + 1].log_n - recs[i].log_n);
  }
  return recs;
}

double tolerance_bound(double delta, double mu, double lambda, double w0, double w1) {
  if (!(delta > 0.0) || !(delta < mu / 4.0)) {
    throw std::invalid_argument("tolerance_bound: need 0 < delta < mu/4");
  }
  if (w0 < 0.0 || w1 < 0.0 || (w0 == 0.0 && w1 == 0.0)) {
    throw std::invalid_argument("tolerance_bound: w0,w1 >= 0, not both zero");
  }
  double num = delta * delta * mu * mu;
  double den = 2.0 * (2.0 * delta * delta + 3.0 * mu * mu) *
               (w0 + w1 * (mu / 4.0 + std::abs(lambda)));
  return num / den;
}

double gap_distance(double lambda, const std::vector<std::pair<double, double>>& bands,
                    const std::vector<double>& discrete) {
  double mu = std::numeric_limits<double>::infinity();
  for (auto [lo, hi] : bands) {
    if (lambda < lo) mu = std::min(mu, lo - lambda);
    else if (lambda > hi) mu = std::min(mu, lambda - hi);
    else return 0.0;
  }
  for (double d : discrete) {
    if (d != lambda) mu = std::min(mu, std::abs(d - lambda));
  }
  return mu;
}

namespace {

using matpoly::Matrix;

// Operator 2-norm by power iteration on A*A; deterministic start.
double spectral_norm(const Matrix& a) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a.cols());
  v.normalize();
  double s = 0.0;
  for (int it = 0; it < 300; ++it) {
    Eigen::VectorXcd w = a.adjoint() * (a * v);
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    double next = std::sqrt(nw);
    w /= nw;
    if (it > 4 && std::abs(next - s) <= 1e-14 * next) {
      s = next;
      break;
    }
    s = next;
    v = w;
  }
  return s;
}

Matrix random_gaussian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(d, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      double re = g(rng), im = g(rng);
      m(r, c) = cxd(re, im);
    }
  }
  return m;
}

int count_in_disc(const std::vector<cxd>& ev, double lambda, double delta) {
  int c = 0;
  for (cxd z : ev) {
    if (std::abs(z - lambda) < delta) ++c;
  }
  return c;
}

bool annulus_empty(const std::vector<cxd>& ev, double lambda, double delta, double mu4) {
  for (cxd z : ev) {
    double d = std::abs(z - lambda);
    if (d >= delta && d <= mu4) return false;
  }
  return true;
}

}  // namespace

PerturbationReport perturbation_experiment(const operators::OperatorModel& model, int n,
                                           double lambda_ref, double mu,
                                           const PerturbationParams& params,
                                           unsigned threads) {
  if (params.trials < 1) throw std::invalid_argument("perturbation_experiment: trials >= 1");
  if (!(params.delta > 0.0) || !(params.delta < mu / 4.0)) {
    throw std::invalid_argument("perturbation_experiment: need 0 < delta < mu/4");
  }
  if (!(params.eps_fraction >= 0.0) || !(params.eps_fraction < 1.0)) {
    throw std::invalid_argument("perturbation_experiment: eps_fraction in [0,1)");
  }

  PerturbationReport rep;
  rep.delta = params.delta;
  rep.mu = mu;
  rep.w0 = params.w0;
  rep.w1 = params.w1;
  rep.n = n;
  rep.lambda = lambda_ref;
  rep.seed = params.seed;
  rep.eps_bound = tolerance_bound(params.delta, mu, lambda_ref, params.w0, params.w1);
  rep.eps = params.eps_fraction * rep.eps_bound;

  auto pencil = operators::pencil_for(model, n);
  const int d = pencil.dim();
  auto base_spec = matpoly::eigenvalues(pencil);
  rep.count_unperturbed = count_in_disc(base_spec.eigenvalues, lambda_ref, params.delta);
  rep.annulus_clear_unperturbed =
      annulus_empty(base_spec.eigenvalues, lambda_ref, params.delta, mu / 4.0);

  const Matrix lin = pencil.linear_coeff().entries();
  const Matrix con = pencil.constant_coeff().entries();

  rep.trials.resize(static_cast<std::size_t>(params.trials));
  parallel_for(rep.trials.size(), threads, [&](std::size_t t) {
    // Per-trial RNG stream keyed by (seed, t): schedule independent.
    std::mt19937_64 rng(params.seed + 0x9e3779b97f4a7c15ULL * (t + 1));
    Matrix f = random_gaussian(d, rng);
    Matrix g = random_gaussian(d, rng);
    double fn = spectral_norm(f);
    double gn = spectral_norm(g);
    // ||F|| = w1 eps, ||G|| = w0 eps exactly (zero when the weight is zero).
    Matrix F = (fn > 0.0 && params.w1 > 0.0 && rep.eps > 0.0)
                   ? Matrix((params.w1 * rep.eps / fn) * f)
                   : Matrix(Matrix::Zero(d, d));
    Matrix G = (gn > 0.0 && params.w0 > 0.0 && rep.eps > 0.0)
                   ? Matrix((params.w0 * rep.eps / gn) * g)
                   : Matrix(Matrix::Zero(d, d));
    // P + Q with Q(z) = F z - G: z^2 - (2M - F) z + ([M^2] - G). The
    // perturbed coefficients are not Hermitian, so eigensolve the companion
    // form directly.
    Matrix comp = Matrix::Zero(2 * d, 2 * d);
    comp.block(0, d, d, d) = Matrix::Identity(d, d);
    comp.block(d, 0, d, d) = -(con - G);
    comp.block(d, d, d, d) = lin - F;
    auto ev = la::eigenvalues_general(comp);
    PerturbationTrial trial;
    trial.count_perturbed = count_in_disc(ev, lambda_ref, params.delta);
    trial.counts_match = trial.count_perturbed == rep.count_unperturbed;
    trial.annulus_clear = annulus_empty(ev, lambda_ref, params.delta, mu / 4.0);
    rep.trials[t] = trial;
  });

  rep.all_counts_match = true;
  rep.all_annuli_clear = true;
  for (const auto& t : rep.trials) {
    rep.all_counts_match = rep.all_counts_match && t.counts_match;
    rep.all_annuli_clear = rep.all_annuli_clear && t.annulus_clear;
  }
  return rep;
}

PipelineResult method_pipeline(const operators::OperatorModel& model, int n,
                               const std::vector<double>& targets, double imag_cut) {
  PipelineResult res;
  auto pencil = operators::pencil_for(model, n);
  res.spectrum = matpoly::eigenvalues(pencil);
  res.encl = enclosures(res.spectrum, imag_cut);
  res.nearest.reserve(targets.size());
  for (double t : targets) {
    res.nearest.push_back(nearest_eigenvalue(res.spectrum, t));
  }
  return res;
}

}  // namespace pipeline
}  // namespace sospec
