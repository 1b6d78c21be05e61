#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sojourn/spectral_core.hpp"

namespace sojourn {

using Amplitude = std::function<cplx(double)>;

/// a(t) = <psi, e^{-iHt} psi> = sum_k w_k e^{-i E_k t}
cplx autocorrelation(const SpectralMeasure& mu, double t);

/// 2 pi / (smallest gap between distinct energies); +inf for a single point.
double heisenberg_time(const SpectralMeasure& mu);

/// Smallest admissible Simpson node count over [-horizon, horizon] for an integrand whose
/// frequencies are bounded by 2 * radius.
long nyquist_nodes(double horizon, double radius);

struct SojournEstimate {
  double value = 0.0;
  double horizon = 0.0;
  std::optional<double> tail_bound;  // empty when the tail is unknown
  double heisenberg_time = 0.0;
  bool recurrence_warning = false;  // horizon > 0.5 * heisenberg_time
  long nodes = 0;
  std::vector<double> times;       // quadrature nodes on [0, horizon]
  std::vector<double> abs_amplitude;  // |a(t)| at those nodes
};

/// int_{-H}^{H} |a(t)|^2 dt by composite Simpson on [0, H] (the integrand is even).
/// n_quad = 0 picks 16x the Nyquist count (at least 2048). Smaller than Nyquist is rejected.
SojournEstimate sojourn_truncated(const SpectralMeasure& mu, double horizon, long n_quad = 0);

/// Same quadrature for an arbitrary amplitude with |a(-t)| = |a(t)|; radius bounds the
/// spectral half-width, used for the Nyquist guard. No recurrence time.
SojournEstimate sojourn_truncated(const Amplitude& a, double radius, double horizon,
                                  long n_quad = 0);

/// int e^{-2 eps |t|} |a(t)|^2 dt = sum_{j,k} w_j w_k 4 eps / ((E_j - E_k)^2 + 4 eps^2)
double sojourn_regularized(const SpectralMeasure& mu, double eps);

/// |a(t)| <= C e^{-gamma t} fitted on samples with |a| >= floor.
struct Envelope {
  double C = 0.0;
  double gamma = 0.0;
  /// Both tails: int_{|t| > H} C^2 e^{-2 gamma |t|} dt
  double tail(double horizon) const;
};

/// Least squares on log|a| over samples above floor, then C raised so every used sample
/// lies under the envelope. Empty if fewer than 3 samples qualify or the fitted decay is not positive.
std::optional<Envelope> fit_envelope(const std::vector<double>& t, const std::vector<double>& abs_a,
                                     double floor = 1e-3);

struct LemmaReport {
  double lhs = 0.0;  // truncated sojourn + tail (tail only when known)
  double truncated = 0.0;
  std::optional<double> tail_bound;
  double rhs = 0.0;  // f(eps)^2 / eps
  double ratio = 0.0;
  bool asserted = false;  // false when the check only reports (unknown tail)
  bool ok = true;
  bool point_spectrum = false;
};

/// Checks T >= f(eps)^2 / eps with T from the truncated sojourn plus a fitted envelope tail.
/// A measure with a single point is treated as point spectrum (infinite sojourn, ok trivially).
LemmaReport lemma_bound_check(const SpectralMeasure& mu, double lambda, double eps,
                              double horizon, double tol = 1e-8, long n_quad = 0);

/// Same check for a given amplitude with its width-function value f(eps) and an envelope.
LemmaReport lemma_bound_check(const Amplitude& a, double radius, double f_eps, double eps,
                              double horizon, std::optional<Envelope> envelope,
                              double tol = 1e-8, long n_quad = 0);

}  // namespace sojourn
