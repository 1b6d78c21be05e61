#pragma once

#include <optional>

#include "sojourn/spectral_core.hpp"

namespace sojourn {

/// f(eps) = 2 eps Im<psi, R(lambda + i eps) psi> = sum_k w_k 2 eps^2 / ((E_k - lambda)^2 + eps^2).
/// Nondecreasing in eps with values in [0, 2].
double width_function(const SpectralMeasure& mu, double lambda, double eps);

struct WidthResult {
  double lambda = 0.0;
  double delta_e = 0.0;
  double f_at_solution = 0.0;
  int iterations = 0;
  /// Weight at lambda is at least 1/2, so f(0+) >= 1 and the width vanishes.
  bool zero_width = false;
};

struct WidthOptions {
  double tol = 1e-10;  // absolute, in energy units
  int max_iterations = 200;
};

/// Leftmost eps with f(eps) = 1 by bisection on [0, eps_hi], eps_hi doubled from 1.
/// Returns the midpoint of the final bracket.
WidthResult energy_width(const SpectralMeasure& mu, double lambda, const WidthOptions& opt = {});
inline WidthResult energy_width(const SpectralMeasure& mu, double lambda, double tol) {
  return energy_width(mu, lambda, WidthOptions{tol, 200});
}

struct BestLambda {
  double lambda = 0.0;
  WidthResult width;
};

/// Minimizes lambda -> Delta E(lambda) over [lo, hi]: 512-point scan, then golden section
/// around the best scanned point. Never returns worse than the best scanned point.
BestLambda best_lambda(const SpectralMeasure& mu, double lo, double hi, double tol = 1e-10,
                       int grid_points = 512);

struct EtupReport {
  double delta_e = 0.0;
  double residual = 0.0;   // ||(H - lambda) psi||
  double t_lower_1 = 0.0;  // 1 / Delta E, +inf when Delta E = 0
  double t_lower_2 = 0.0;  // 1 / ||(H - lambda) psi||
  bool chain_ok = false;   // Delta E <= residual + tol
};

EtupReport etup_chain(const HermitianOperator& H, const State& psi, double lambda,
                      double tol = 1e-10);

/// Both sides of 1/<psi, R(z) psi> = <psi, (H - z) psi> - F(z), F(z) = <v, R^perp(z) v>,
/// v = P^perp H psi. The left side comes from the eigendecomposition of H, the right side
/// from the eigendecomposition of the reduced operator, so the two are independent routes.
class FeshbachMap {
 public:
  FeshbachMap(const HermitianOperator& H, const State& psi);

  const SpectralMeasure& measure() const { return mu_; }
  double expectation() const { return mean_; }
  /// <psi, R(z) psi>
  cplx resolvent(cplx z) const;
  /// F(z)
  cplx F(cplx z) const;
  cplx lhs(cplx z) const;
  cplx rhs(cplx z) const;
  double residual(cplx z) const;
  /// |Delta E - |<H> - lambda - F(lambda + i Delta E)||
  double fixed_point_residual(double lambda, double delta_e) const;

 private:
  SpectralMeasure mu_;
  double mean_ = 0.0;
  WeightedSpectrum v_weights_;
};

double feshbach_residual(const HermitianOperator& H, const State& psi, cplx z);
double fixed_point_residual(const HermitianOperator& H, const State& psi, double lambda,
                            double delta_e);

}  // namespace sojourn
