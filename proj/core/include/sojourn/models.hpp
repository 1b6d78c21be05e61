#pragma once

#include <functional>
#include <memory>

#include "sojourn/perturbation.hpp"
#include "sojourn/sojourn_time.hpp"
#include "sojourn/spectral_core.hpp"

namespace sojourn {

// ---------------------------------------------------------------- Lorentzian

/// Cauchy measure (1/pi) Gamma / ((E - E_r)^2 + Gamma^2) dE.
struct LorentzianModel {
  double E_r = 0.0;
  double Gamma = 1.0;

  LorentzianModel() = default;
  LorentzianModel(double e_r, double gamma);
};

/// f(eps) = 2 eps (eps + Gamma) / ((lambda - E_r)^2 + (eps + Gamma)^2)
double lorentzian_f(const LorentzianModel& m, double lambda, double eps);
/// sqrt(Gamma^2 + (lambda - E_r)^2)
double lorentzian_width(const LorentzianModel& m, double lambda);
/// e^{-i E_r t - Gamma |t|}
cplx lorentzian_amplitude(const LorentzianModel& m, double t);
/// <psi, R(z) psi> = 1 / (E_r - i Gamma - z) for Im z > 0
cplx lorentzian_resolvent(const LorentzianModel& m, cplx z);

/// Closed-form WidthResult (f evaluated at the closed-form width).
WidthResult lorentzian_energy_width(const LorentzianModel& m, double lambda);

/// n equal-weight points at the mid-quantiles E_r + Gamma tan(pi (k + 1/2)/n - pi/2);
/// points beyond E_r +- cutoff are moved onto the cutoff so that no weight is lost.
SpectralMeasure lorentzian_discretize(const LorentzianModel& m, int n, double cutoff);

/// Lemma check on the exact amplitude: the tail beyond the horizon is known in closed form.
LemmaReport lorentzian_lemma_check(const LorentzianModel& m, double lambda, double eps,
                                   double horizon, double tol = 1e-8);

// ---------------------------------------------------------------- Wigner-Weisskopf

struct WignerWeisskopfSpec {
  double E0 = 0.0;
  double band_lo = -2.0;
  double band_hi = 2.0;
  int n_levels = 1000;
  std::function<double(double)> coupling = [](double) { return 1.0; };

  double spacing() const { return (band_hi - band_lo) / n_levels; }
  double level(int m) const { return band_lo + (m + 0.5) * spacing(); }
  void validate() const;
};

/// H0 = diag(E0, E_1..E_n) with E_m at the cell midpoints of the band, psi = e_0,
/// V = |psi><v| + |v><psi| with v_m = g(E_m) sqrt(spacing).
PerturbedFamily wigner_weisskopf(const WignerWeisskopfSpec& spec);

/// Wigner-Weisskopf family on [E_r - half_band, E_r + half_band] with flat g^2 = Gamma / pi, so
/// that at kappa = 1 the golden-rule width equals Gamma.
PerturbedFamily lorentzian_embedding(const LorentzianModel& m, int n_levels, double half_band);

// ---------------------------------------------------------------- lattice models

enum class Boundary { Dirichlet, Periodic };

/// Nearest-neighbour chain H_{i,i+1} = hopping, eigenvalues 2 hopping cos(pi k / (L + 1)).
HermitianOperator free_chain(int L, double hopping, Boundary bc = Boundary::Dirichlet);

struct TightBindingModel {
  HermitianOperator H;
  State defect;
  int coupled_site = 0;
};

/// Chain of L sites plus one defect site (index L) of energy defect_energy, side-coupled
/// to the middle of the chain with strength coupling.
TightBindingModel tight_binding_defect(int L, double hopping, double defect_energy,
                                       double coupling = 0.5);

/// Same geometry as a perturbed family: H0 is the decoupled chain plus defect,
/// V the side coupling of unit strength.
PerturbedFamily tight_binding_family(int L, double hopping, double defect_energy);

struct Grid1D {
  double x_min = 0.0;
  double h = 0.1;
  int n = 100;
  Boundary bc = Boundary::Periodic;

  double x(int i) const { return x_min + i * h; }
  double length() const { return n * h; }
};

/// Smooth real potential with derivative; either analytic or a cubic B-spline of samples.
struct Potential1D {
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  /// Cubic B-spline through W(x_i), i = 0..n-1 (requires grid.n >= 4).
  static Potential1D spline(const Grid1D& grid, const RealVector& samples);
};

/// -1/2 d^2/dx^2 by the 3-point stencil plus diag(W(x_i)).
HermitianOperator schrodinger_1d(const Grid1D& grid, const RealVector& W);
HermitianOperator schrodinger_1d(const Grid1D& grid, const Potential1D& W);

}  // namespace sojourn
