#pragma once

#include <map>
#include <vector>

#include "sojourn/floquet.hpp"
#include "sojourn/models.hpp"

namespace sojourn {

/// 1D particle in a potential well W driven by a homogeneous periodic field
/// F(t) = sum_n F_n e^{i n omega t} (zero mean), coupling kappa.
struct AcStarkScenario {
  Grid1D grid;
  Potential1D W;
  RealVector W_samples;
  Potential1D W_interp;  // cubic spline of W_samples
  RealVector dW;        // central differences of the samples (periodic wrap)
  RealVector dW_exact;  // W.derivative on the grid
  std::map<int, cplx> F;  // both signs, F_{-n} = conj(F_n)
  double omega = 1.0;
  double kappa = 0.0;

  HermitianOperator H0;  // -1/2 Laplacian (3-point) + W
  State psi;             // ground state of H0
  double E0 = 0.0;
  /// Linearized drive: vhat(n) = (F_n / (i n omega)^2) diag(W').
  FloquetProblem problem;

  double field(double t) const;
  /// q(t) = sum_{n != 0} F_n / (i n omega)^2 e^{i n omega t}, so q'' = F
  double q(double t) const;
  double qdot(double t) const;
  /// H0 + diag(W(x + kappa q(t)) - W(x)), W(x + kappa q) from a cubic spline of the samples.
  Matrix exact_hamiltonian(double t) const;
};

/// Builds the scenario. F_positive holds F_n for n >= 1; a nonzero n = 0 entry is rejected.
/// N = 0 picks the truncation from default_truncation.
AcStarkScenario ac_stark_scenario(const Grid1D& grid, const Potential1D& W,
                                  const std::map<int, cplx>& F_positive, double omega,
                                  double kappa, int N = 0);

/// Direct evaluation of the AC-Stark width from W' (analytic derivative):
/// kappa^2 sum_{n != 0} |F_n|^2 / (omega^4 n^4) Im <W' psi, R0(E0 - n omega + i eta) W' psi>.
double eacs_width(const AcStarkScenario& sc, double eta);

struct GaugeReport {
  double residual = 0.0;  // ||S(t1) psi_fall(t1) - psi_lab(t1)||
  double leakage = 0.0;   // probability in the outer 10% of the box at each end, max over frames
  double phase = 0.0;     // phi(t1), phi(t0) = 0
  int steps = 0;
};

/// Propagates psi in the falling frame (-1/2 D^2 + W(x + kappa q)) and in the laboratory frame
/// (-1/2 D^2 - kappa F x + W) with exact midpoint exponentials (spectral kinetic energy,
/// Chebyshev series), then compares through the phase-space translation S(t).
/// Throws NumericalFailure when leakage exceeds 1e-6.
GaugeReport gauge_equivalence_check(const AcStarkScenario& sc, double t0, double t1, int n_steps);

struct GaugeConvergence {
  std::vector<int> steps;
  std::vector<double> residuals;
  double order = 0.0;  // -slope of log residual against log step count
};

GaugeConvergence gauge_convergence(const AcStarkScenario& sc, double t0, double t1,
                                   const std::vector<int>& steps);

}  // namespace sojourn
