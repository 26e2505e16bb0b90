#pragma once

// End-to-end drivers: build pencils across n, pick near-real eigenvalues,
// turn them into enclosure intervals, run convergence studies with the
// pairwise slope column, and run the perturbation-stability experiment.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "sospec/matpoly.hpp"
#include "sospec/operators.hpp"

namespace sospec {
namespace pipeline {

using matpoly::cxd;
using matpoly::QuadraticPencil;
using matpoly::SpectrumResult;

// [Re z - |Im z|, Re z + |Im z|]; guaranteed to intersect Spec M when z is
// an eigenvalue of an exact second-order truncation.
struct Enclosure {
  double lo;
  double hi;
  cxd witness;
};

struct ConvergenceRecord {
  int n;
  cxd z_n;
  double err;      // |z_n - lambda_ref|
  double log_err;  // natural log
  double log_n;
  std::optional<double> slope;  // forward difference; absent on the last row
};

struct PerturbationTrial {
  bool counts_match = false;
  bool annulus_clear = false;
  int count_perturbed = 0;
};

struct PerturbationReport {
  double delta = 0.0;
  double mu = 0.0;
  double eps_bound = 0.0;  // tolerance_bound for the run parameters
  double eps = 0.0;        // the perturbation size actually used
  double w0 = 1.0, w1 = 1.0;
  int n = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int count_unperturbed = 0;
  bool annulus_clear_unperturbed = false;
  std::vector<PerturbationTrial> trials;
  bool all_counts_match = false;
  bool all_annuli_clear = false;
};

// argmin |z - target|; exact ties prefer nonnegative imaginary part, then
// ascending real part.
cxd nearest_eigenvalue(const SpectrumResult& spec, double target);

// One enclosure per eigenvalue with |Im z| <= imag_cut, sorted by lo
// (ties by hi, then witness real part).
std::vector<Enclosure> enclosures(const SpectrumResult& spec, double imag_cut);

// One record per n; parallel over n with an ordered merge.
std::vector<ConvergenceRecord> convergence_study(const operators::OperatorModel& model,
                                                 double lambda_ref,
                                                 const std::vector<int>& ns,
                                                 unsigned threads = 1);

// delta^2 mu^2 / (2 (2 delta^2 + 3 mu^2) [w0 + w1 (mu/4 + |lambda|)]).
// Requires 0 < delta < mu/4 and w0, w1 >= 0 not both zero.
double tolerance_bound(double delta, double mu, double lambda, double w0, double w1);

struct PerturbationParams {
  double delta = 0.05;
  double w0 = 1.0;
  double w1 = 1.0;
  int trials = 50;
  std::uint64_t seed = 0;
  double eps_fraction = 0.9;  // eps = eps_fraction * tolerance_bound
};

// Theorem-5 style experiment: random Q_n(z) = F_n z - G_n with
// ||F_n|| <= w1 eps, ||G_n|| <= w0 eps, eps strictly below the tolerance
// bound. Records, per trial, whether the eigenvalue count in
// {|z-lambda| < delta} is preserved and whether the annulus
// {delta <= |z-lambda| <= mu/4} stays empty. The guarantee is asymptotic in
// n, so outcomes are reported, not asserted.
PerturbationReport perturbation_experiment(const operators::OperatorModel& model, int n,
                                           double lambda_ref, double mu,
                                           const PerturbationParams& params,
                                           unsigned threads = 1);

struct PipelineResult {
  SpectrumResult spectrum;
  std::vector<Enclosure> encl;
  std::vector<cxd> nearest;  // one per target
};

// build -> eigenvalues -> enclosures -> nearest; the CLI's workhorse.
PipelineResult method_pipeline(const operators::OperatorModel& model, int n,
                               const std::vector<double>& targets, double imag_cut);

// Gap distance dist(lambda, Spec M \ {lambda}) from closed-form spectrum
// metadata plus the secular eigenvalues.
double gap_distance(double lambda, const std::vector<std::pair<double, double>>& bands,
                    const std::vector<double>& discrete);

}  // namespace pipeline
}  // namespace sospec
