#pragma once

#include <optional>

#include "sojourn/perturbation.hpp"
#include "sojourn/spectral_core.hpp"

namespace sojourn {

/// Bound channel H1 coupled to a propagating channel H2 through kappa V (d1 x d2).
struct TwoChannelModel {
  HermitianOperator H1;
  HermitianOperator H2;
  Matrix V;
  double kappa = 0.0;
  State psi0;  // H1 psi0 = E0 psi0, E0 simple in H1
  double E0 = 0.0;

  Eigen::Index dim() const { return H1.dim() + H2.dim(); }
  void validate() const;
};

/// [[H1, kappa V], [kappa V^dagger, H2]]
HermitianOperator build_block(const TwoChannelModel& m);
/// psi0 (+) 0
State embed_bound(const TwoChannelModel& m);

/// kappa^2 Im <V^dagger psi0, (H2 - E0 - i eta)^{-1} V^dagger psi0>
double ms_fgr(const TwoChannelModel& m, double eta);

/// Block-diagonal H0 with the off-diagonal coupling as a linear perturbed family around psi0 (+) 0.
PerturbedFamily to_family(const TwoChannelModel& m);

struct MultistateReport {
  double lambda2 = 0.0;
  double gamma_fgr = 0.0;
  double delta_e = 0.0;
  double sojourn_lb = 0.0;  // 1 / delta_e
  double sojourn = 0.0;     // truncated
  double horizon = 0.0;
  double heisenberg_time = 0.0;
  bool infinite = false;    // kappa = 0 or vanishing coupling: bound state never decays
  bool bound_ok = false;    // sojourn >= (1 - rel_tol) / delta_e
};

/// Full chain at the model's kappa: lambda2 and gamma at eta, Delta E(lambda2) of psi0 (+) 0
/// under the block operator, truncated sojourn at horizon_fraction of the Heisenberg time.
MultistateReport ms_pipeline(const TwoChannelModel& m, double eta, double horizon_fraction = 0.4,
                             double rel_tol = 0.02, const WidthOptions& opt = {});

}  // namespace sojourn
