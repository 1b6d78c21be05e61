#include "sojourn/width.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sojourn/errors.hpp"

namespace sojourn {

double width_function(const SpectralMeasure& mu, double lambda, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("width: eps must be positive");
  const double e2 = eps * eps;
  double f = 0.0;
  for (const auto& p : mu.points()) {
    const double d = p.energy - lambda;
    f += p.weight * 2.0 * e2 / (d * d + e2);
  }
  return f;
}

WidthResult energy_width(const SpectralMeasure& mu, double lambda, const WidthOptions& opt) {
  if (!(opt.tol > 0.0)) throw InvalidArgument("width: tol must be positive");
  if (opt.max_iterations <= 0) throw InvalidArgument("width: max_iterations must be positive");

  WidthResult r;
  r.lambda = lambda;
  const double e_ref = std::max({1.0, std::abs(mu.min_energy()), std::abs(mu.max_energy())});
  if (mu.weight_at(lambda, 1e-9 * e_ref) >= 0.5) {
    r.zero_width = true;
    r.delta_e = 0.0;
    r.f_at_solution = 2.0 * mu.weight_at(lambda, 1e-9 * e_ref);
    return r;
  }

  double lo = 0.0, hi = 1.0;
  // f -> 2 as eps grows, so this terminates for any probability measure.
  while (width_function(mu, lambda, hi) < 1.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalFailure("width: could not bracket f(eps) = 1");
  }
  int it = 0;
  while (hi - lo > opt.tol && it < opt.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    if (width_function(mu, lambda, mid) >= 1.0) hi = mid;
    else lo = mid;
    ++it;
  }
  r.delta_e = 0.5 * (lo + hi);
  r.iterations = it;
  r.f_at_solution = width_function(mu, lambda, r.delta_e);
  return r;
}

BestLambda best_lambda(const SpectralMeasure& mu, double lo, double hi, double tol,
                       int grid_points) {
  if (!(hi >= lo)) throw InvalidArgument("width: best_lambda needs lo <= hi");
  if (grid_points < 2) grid_points = 2;
  const WidthOptions opt{tol, 200};

  BestLambda best;
  best.width.delta_e = std::numeric_limits<double>::infinity();
  auto consider = [&](double lam) {
    WidthResult w = energy_width(mu, lam, opt);
    if (w.delta_e < best.width.delta_e) {
      best.lambda = lam;
      best.width = w;
    }
    return w.delta_e;
  };

  if (hi == lo) {
    consider(lo);
    return best;
  }
  const double h = (hi - lo) / (grid_points - 1);
  int arg = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double before = best.width.delta_e;
    consider(lo + i * h);
    if (best.width.delta_e < before) arg = i;
  }

  // Golden section on the neighbouring cells of the best scanned point.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo + std::max(arg - 1, 0) * h;
  double b = lo + std::min(arg + 1, grid_points - 1) * h;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = consider(c), fd = consider(d);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = consider(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = consider(d);
    }
  }
  return best;
}

EtupReport etup_chain(const HermitianOperator& H, const State& psi, double lambda, double tol) {
  EtupReport r;
  const WidthResult w = energy_width(spectral_measure(H, psi), lambda, WidthOptions{tol, 200});
  r.delta_e = w.delta_e;
  r.residual = residual_norm(H, psi, lambda);
  const double inf = std::numeric_limits<double>::infinity();
  r.t_lower_1 = r.delta_e > 0.0 ? 1.0 / r.delta_e : inf;
  r.t_lower_2 = r.residual > 0.0 ? 1.0 / r.residual : inf;
  r.chain_ok = r.delta_e <= r.residual + tol;
  return r;
}

// ---------------------------------------------------------------- Feshbach

FeshbachMap::FeshbachMap(const HermitianOperator& H, const State& psi)
    : mu_(spectral_measure(H, psi)) {
  const Vector hpsi = H.apply(psi.vec());
  mean_ = psi.vec().dot(hpsi).real();
  const Vector v = hpsi - mean_ * psi.vec();
  if (H.dim() > 1) v_weights_ = ReducedOperator(H, psi).weights(v);
}

cplx FeshbachMap::resolvent(cplx z) const { return resolvent_expectation(mu_, z); }

cplx FeshbachMap::F(cplx z) const {
  if (v_weights_.energies.size() == 0) return 0.0;
  return v_weights_.stieltjes(z);
}

cplx FeshbachMap::lhs(cplx z) const {
  const cplx g = resolvent(z);
  if (g == cplx(0.0)) throw NumericalFailure("width: <psi, R(z) psi> vanished");
  return 1.0 / g;
}

cplx FeshbachMap::rhs(cplx z) const { return mean_ - z - F(z); }

double FeshbachMap::residual(cplx z) const {
  if (z.imag() == 0.0) throw InvalidArgument("width: feshbach_residual needs Im z != 0");
  return std::abs(lhs(z) - rhs(z));
}

double FeshbachMap::fixed_point_residual(double lambda, double delta_e) const {
  if (!(delta_e > 0.0))
    throw InvalidArgument("width: fixed_point_residual needs a positive width");
  const cplx a = mean_ - lambda - F(cplx(lambda, delta_e));
  return std::abs(delta_e - std::abs(a));
}

double feshbach_residual(const HermitianOperator& H, const State& psi, cplx z) {
  return FeshbachMap(H, psi).residual(z);
}

double fixed_point_residual(const HermitianOperator& H, const State& psi, double lambda,
                            double delta_e) {
  return FeshbachMap(H, psi).fixed_point_residual(lambda, delta_e);
}

}  // namespace sojourn
