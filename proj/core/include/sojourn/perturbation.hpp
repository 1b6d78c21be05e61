#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sojourn/spectral_core.hpp"
#include "sojourn/width.hpp"

namespace sojourn {

using CouplingMap = std::function<Matrix(double kappa)>;

/// H(kappa) = H0 + kappa V(kappa) with an embedded simple eigenpair H0 psi = E0 psi.
class PerturbedFamily {
 public:
  /// Linear family, V(kappa) = V0.
  PerturbedFamily(HermitianOperator H0, Matrix V0, State psi, double E0);
  PerturbedFamily(HermitianOperator H0, CouplingMap V, State psi, double E0);

  const HermitianOperator& H0() const { return H0_; }
  Matrix V(double kappa) const;
  const State& psi() const { return psi_; }
  double E0() const { return E0_; }
  /// Distance from E0 to the nearest other eigenvalue of H0.
  double gap() const { return gap_; }
  /// H0 restricted to the complement of psi, diagonalized once.
  const ReducedOperator& reduced() const { return *reduced_; }
  HermitianOperator H(double kappa) const;

  /// Median of the ~20 level gaps of H0^perp nearest E0.
  double local_spacing() const { return spacing_; }
  double bandwidth() const { return bandwidth_; }

 private:
  void validate();
  HermitianOperator H0_;
  CouplingMap V_;
  State psi_;
  double E0_;
  double gap_ = 0.0;
  double spacing_ = 0.0;
  double bandwidth_ = 0.0;
  std::shared_ptr<const ReducedOperator> reduced_;
};

struct FgrResult {
  double kappa = 0.0;
  double lambda2 = 0.0;
  double gamma_fgr = 0.0;
  double eta_used = 0.0;
  std::optional<double> delta_e_exact;
};

/// gamma = kappa^2 Im <P V(0) psi, R0^perp(E0 + i eta) P V(0) psi>, plus lambda2 at the same eta.
FgrResult fgr_width(const PerturbedFamily& fam, double kappa, double eta);

/// E0 + kappa <psi, V(kappa) psi> - kappa^2 Re <P V(kappa) psi, R0^perp(E0 + i eta) P V(kappa) psi>
double lamb_shift_lambda2(const PerturbedFamily& fam, double kappa, double eta);

struct EtaWindow {
  double lo = 0.0;  // floor_factor * local spacing
  double hi = 0.0;  // ceiling_fraction * bandwidth
  double floor_factor = 3.0;
  double ceiling_fraction = 0.1;
  bool empty() const { return !(lo < hi); }
};

EtaWindow admissible_window(const PerturbedFamily& fam, double floor_factor = 3.0,
                            double ceiling_fraction = 0.1);

/// count etas spaced geometrically over [window.lo, min(window.hi, 20 * spacing)], descending.
std::vector<double> default_eta_list(const PerturbedFamily& fam, int count = 6);

struct EtaFit {
  double gamma_limit = 0.0;  // intercept at eta = 0
  double slope = 0.0;
  double quality = 0.0;  // RMS residual of the linear fit
  EtaWindow window;
  std::vector<double> etas;
  std::vector<double> gammas;
};

/// Linear least squares of gamma_fgr(eta) in eta. Throws NumericalFailure when the window is
/// empty (grid too coarse) and InvalidArgument when an eta lies outside the window.
EtaFit eta_extrapolation(const PerturbedFamily& fam, double kappa, const std::vector<double>& etas,
                         const EtaWindow& window);
EtaFit eta_extrapolation(const PerturbedFamily& fam, double kappa, const std::vector<double>& etas);

struct SweepOptions {
  WidthOptions width;
  bool sojourn = false;           // also compute the truncated sojourn at each kappa
  double horizon_fraction = 0.4;  // of the Heisenberg time
};

struct SweepRow {
  FgrResult fgr;
  double delta_e = 0.0;
  double sojourn_lb = 0.0;  // 1 / delta_e
  std::optional<double> sojourn_trunc;
  double ratio = 0.0;       // (delta_e / kappa^2) / (gamma_fgr / kappa^2)
  bool recurrence_warning = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // log-log fit of delta_e against kappa over rows with kappa > 0
  double intercept = 0.0;
};

SweepResult kappa_sweep(const PerturbedFamily& fam, const std::vector<double>& kappas, double eta,
                        const SweepOptions& opt = {});

/// Least squares slope and intercept of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sojourn
