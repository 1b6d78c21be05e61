#include "sojourn/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sojourn/errors.hpp"

namespace sojourn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double half_spread(const Matrix& h) {
  const linalg::EigenSystem es = linalg::eigh(h);
  return 0.5 * (es.values[es.dim() - 1] - es.values[0]);
}

void check_steps(double t0, double t1, int n_steps, double omega, double radius, int per_period) {
  if (n_steps <= 0) throw InvalidArgument("floquet: propagator needs a positive step count");
  const int need = min_steps(t0, t1, omega, radius, per_period);
  if (n_steps < need)
    throw InvalidArgument("floquet: " + std::to_string(n_steps) +
                          " steps under-resolve the dynamics; need at least " +
                          std::to_string(need));
}

}  // namespace

int min_steps(double t0, double t1, double omega, double radius, int per_period) {
  double shortest = std::numeric_limits<double>::infinity();
  if (omega > 0.0) shortest = kTwoPi / omega;
  if (radius > 0.0) shortest = std::min(shortest, kTwoPi / radius);
  if (!std::isfinite(shortest)) return 1;
  return static_cast<int>(std::ceil(per_period * std::abs(t1 - t0) / shortest));
}

Propagator propagate(const TimeDependentH& H, double t0, double t1, int n_steps,
                     const PropagatorOptions& opt) {
  if (n_steps <= 0) throw InvalidArgument("floquet: propagator needs a positive step count");
  const double dt = (t1 - t0) / n_steps;
  Matrix h = H(t0 + 0.5 * dt);
  const double radius = opt.radius > 0.0 ? opt.radius : half_spread(h);
  check_steps(t0, t1, n_steps, opt.omega, radius, opt.min_steps_per_period);

  const Eigen::Index d = h.rows();
  Propagator p;
  Matrix U = Matrix::Identity(d, d);
  const Matrix I = Matrix::Identity(d, d);
  if (opt.keep_history) {
    p.times.push_back(t0);
    p.U.push_back(U);
  }
  for (int k = 0; k < n_steps; ++k) {
    if (k > 0) h = H(t0 + (k + 0.5) * dt);
    U = linalg::unitary_step(h, dt) * U;
    const double drift = (U.adjoint() * U - I).norm();
    if (drift > opt.reunitarize_above) {
      U = linalg::polar_unitary(U);
      ++p.reunitarizations;
    }
    p.max_unitarity_drift = std::max(p.max_unitarity_drift, (U.adjoint() * U - I).norm());
    if (opt.keep_history || k + 1 == n_steps) {
      p.times.push_back(t0 + (k + 1) * dt);
      p.U.push_back(U);
    }
  }
  if (!opt.keep_history) p.times = {t0, t1};
  return p;
}

Vector propagate(const TimeDependentH& H, const Vector& psi, double t0, double t1, int n_steps,
                 const PropagatorOptions& opt) {
  if (n_steps <= 0) throw InvalidArgument("floquet: propagator needs a positive step count");
  const double dt = (t1 - t0) / n_steps;
  Vector v = psi;
  for (int k = 0; k < n_steps; ++k) {
    const Matrix h = H(t0 + (k + 0.5) * dt);
    const linalg::EigenSystem es = linalg::eigh(h);
    if (k == 0) {
      const double radius =
          opt.radius > 0.0 ? opt.radius : 0.5 * (es.values[es.dim() - 1] - es.values[0]);
      check_steps(t0, t1, n_steps, opt.omega, radius, opt.min_steps_per_period);
    }
    Vector c = es.to_eigenbasis(v);
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] *= std::polar(1.0, -dt * es.values[j]);
    v = es.from_eigenbasis(c);
  }
  return v;
}

PeriodicSteps::PeriodicSteps(const TimeDependentH& H, double omega, int steps_per_period) {
  if (!(omega > 0.0)) throw InvalidArgument("floquet: omega must be positive");
  if (steps_per_period < 1) throw InvalidArgument("floquet: steps_per_period must be positive");
  dt_ = kTwoPi / omega / steps_per_period;
  steps_.reserve(steps_per_period);
  for (int k = 0; k < steps_per_period; ++k) {
    const Matrix h = H((k + 0.5) * dt_);
    if (k == 0) check_steps(0.0, kTwoPi / omega, steps_per_period, omega, half_spread(h), 20);
    steps_.push_back(linalg::unitary_step(h, dt_));
  }
}

const Matrix& PeriodicSteps::step(long k) const {
  const long m = static_cast<long>(steps_.size());
  return steps_[((k % m) + m) % m];
}

Vector PeriodicSteps::run(const Vector& psi, long start, long n,
                          const std::function<void(long, const Vector&)>& observe) const {
  Vector v = psi;
  for (long i = 0; i < n; ++i) {
    v = step(start + i) * v;
    if (observe) observe(i + 1, v);
  }
  return v;
}

}  // namespace sojourn
