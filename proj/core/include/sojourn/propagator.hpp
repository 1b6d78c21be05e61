#pragma once

#include <functional>
#include <vector>

#include "sojourn/linalg.hpp"

namespace sojourn {

using TimeDependentH = std::function<Matrix(double t)>;

struct PropagatorOptions {
  /// Drive frequency; 0 for an aperiodic H(t).
  double omega = 0.0;
  /// Half-width of the spectrum of H(t); 0 means "estimate from H at the first midpoint".
  double radius = 0.0;
  int min_steps_per_period = 20;
  /// Keep U at every grid time (otherwise only the final one).
  bool keep_history = true;
  /// Polar re-unitarization kicks in when ||U^dagger U - I|| exceeds this after a step.
  double reunitarize_above = 1e-10;
};

/// Time-ordered U(t, t0) on an equispaced grid, from midpoint exponential steps
/// U <- exp(-i dt H(t + dt/2)) U.
struct Propagator {
  std::vector<double> times;
  std::vector<Matrix> U;  // U[k] = U(times[k], t0); only the last one without history
  double max_unitarity_drift = 0.0;
  int reunitarizations = 0;

  const Matrix& final() const { return U.back(); }
};

/// Rejects step counts below min_steps_per_period per shortest period
/// (2 pi / omega and 2 pi / radius).
Propagator propagate(const TimeDependentH& H, double t0, double t1, int n_steps,
                     const PropagatorOptions& opt = {});

/// U(t1, t0) psi without forming U.
Vector propagate(const TimeDependentH& H, const Vector& psi, double t0, double t1, int n_steps,
                 const PropagatorOptions& opt = {});

/// Minimum admissible step count for the guard above.
int min_steps(double t0, double t1, double omega, double radius, int per_period = 20);

/// One-period table of midpoint step unitaries for a T-periodic H, step dt = T / M.
/// Step k covers [k dt, (k + 1) dt) modulo the period, so any start time on the grid reuses it.
class PeriodicSteps {
 public:
  PeriodicSteps(const TimeDependentH& H, double omega, int steps_per_period);
  int steps_per_period() const { return static_cast<int>(steps_.size()); }
  double dt() const { return dt_; }
  const Matrix& step(long k) const;
  /// psi after n steps starting at grid index start; calls observe(i, psi) after each step.
  Vector run(const Vector& psi, long start, long n,
             const std::function<void(long, const Vector&)>& observe = {}) const;

 private:
  double dt_;
  std::vector<Matrix> steps_;
};

}  // namespace sojourn
