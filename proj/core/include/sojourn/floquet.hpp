#pragma once

#include <map>
#include <optional>

#include "sojourn/perturbation.hpp"
#include "sojourn/propagator.hpp"
#include "sojourn/spectral_core.hpp"

namespace sojourn {

/// Periodic drive V(t) = sum_n vhat(n) e^{i n omega t}, vhat(n) = (1/T) int e^{-i n omega t} V(t) dt,
/// on top of H0. Time functions phi(t) = sum_n e^{i n omega t} phi_n are stored harmonic by harmonic.
struct FloquetProblem {
  HermitianOperator H0;
  std::map<int, Matrix> vhat;
  double omega = 1.0;
  int N = 1;
  double kappa = 0.0;

  /// Largest |n| with a nonzero vhat(n).
  int M() const;
  double period() const;
  /// vhat(n), zero if absent.
  Matrix coefficient(int n) const;
  /// H(t) = H0 + kappa V(t)
  Matrix hamiltonian(double t) const;
  TimeDependentH hamiltonian_fn() const;
  /// Throws InvalidArgument on shape errors, vhat(-n) != vhat(n)^dagger beyond 1e-12, or N < M.
  void validate() const;
};

/// Fills vhat(-n) = vhat(n)^dagger from the n > 0 entries (n = 0 must be Hermitian).
std::map<int, Matrix> symmetric_drive(const std::map<int, Matrix>& positive);

/// Smallest N with kappa max||vhat|| / (omega (N - M)) < target, at least M + 1.
int default_truncation(const FloquetProblem& fp, double target = 1e-3);

/// K with block (n, m) = delta_nm (H0 + n omega) + kappa vhat(n - m), block index n + N.
HermitianOperator build_floquet(const FloquetProblem& fp);

/// Extended-space vector from harmonics {n: phi_n}; h_0 (x) psi is {{0, psi}}.
Vector embed(const FloquetProblem& fp, const std::map<int, Vector>& harmonics);
/// phi(t) = sum_n e^{i n omega t} phi_n for an extended-space vector.
Vector evaluate(const FloquetProblem& fp, const Vector& extended, double t);

struct HowlandReport {
  double residual = 0.0;  // max over the time grid of ||(e^{-iKs} phi)(t + s) - U(t + s, t) phi(t)||
  std::vector<double> times;
  std::vector<double> residuals;
};

/// Compares both sides of the Howland identity on n_times equispaced t in [0, T).
/// phi must only use harmonics |n| <= N - margin.
HowlandReport howland_check(const FloquetProblem& fp, const std::map<int, Vector>& phi, double s,
                            int n_times = 8, int steps_per_period = 256, int margin = 1);
HowlandReport howland_check(const FloquetProblem& fp, const HermitianOperator& K,
                            const std::map<int, Vector>& phi, double s, int n_times = 8,
                            int steps_per_period = 256, int margin = 1);

struct AveragedSojourn {
  bool infinite = false;  // kappa = 0: psi never leaves, both sides diverge
  double averaged = 0.0;  // (1/T) int_0^T T(H(.), psi, t0) dt0, truncated at the horizon
  std::vector<double> per_t0;
  double floquet = 0.0;   // truncated sojourn of h_0 (x) psi under K
  bool jensen_ok = true;  // floquet <= averaged * (1 + rel_tol)
  double horizon = 0.0;
};

/// Time-side average over n_t0 equispaced initial times, propagated with a cached one-period
/// step table; steps_per_period must be a multiple of n_t0.
AveragedSojourn averaged_sojourn(const FloquetProblem& fp, const HermitianOperator& K,
                                 const State& psi, double horizon, int n_t0 = 8,
                                 int steps_per_period = 64, double rel_tol = 0.01);
AveragedSojourn averaged_sojourn(const FloquetProblem& fp, const State& psi, double horizon,
                                 int n_t0 = 8, int steps_per_period = 64, double rel_tol = 0.01);

/// Throws NonResonanceViolation if E0 + n omega hits another eigenvalue of H0 within 1e-9.
void check_non_resonance(const FloquetProblem& fp, double E0, const State& psi);

/// kappa^2 sum_{|n| <= M} Im <vhat(n) psi, Rt(E0 - n omega + i eta) vhat(n) psi>, with the reduced
/// resolvent of H0 for n = 0 and the full one otherwise (harmonic n sits at H0 + n omega in K).
double floquet_fgr(const FloquetProblem& fp, const State& psi, double E0, double eta);

/// K at kappa = 0 with the kappa-linear block coupling as a PerturbedFamily around h_0 (x) psi.
PerturbedFamily floquet_family(const FloquetProblem& fp, const State& psi, double E0);

}  // namespace sojourn
