#include "sojourn/ac_stark.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/FFT>

#include "sojourn/errors.hpp"
#include "sojourn/perturbation.hpp"

namespace sojourn {

namespace {

constexpr double kPi = std::numbers::pi;

double harmonic_sum(const std::map<int, cplx>& F, double omega, double t, int power) {
  cplx s = 0.0;
  for (const auto& [n, f] : F) {
    if (n == 0) continue;
    const cplx ino(0.0, n * omega);
    s += f / std::pow(ino, power) * std::polar(1.0, n * omega * t);
  }
  return s.real();
}

}  // namespace

double AcStarkScenario::field(double t) const { return harmonic_sum(F, omega, t, 0); }
double AcStarkScenario::q(double t) const { return harmonic_sum(F, omega, t, 2); }
double AcStarkScenario::qdot(double t) const { return harmonic_sum(F, omega, t, 1); }

Matrix AcStarkScenario::exact_hamiltonian(double t) const {
  const double shift = kappa * q(t);
  const double lo = grid.x_min, span = (grid.n - 1) * grid.h;
  Matrix h = H0.matrix();
  for (int i = 0; i < grid.n; ++i) {
    double x = grid.x(i) + shift;
    // W is negligible at the edges; wrap instead of extrapolating the spline.
    if (x < lo) x += span;
    if (x > lo + span) x -= span;
    h(i, i) += W_interp.value(x) - W_samples[i];
  }
  return h;
}

AcStarkScenario ac_stark_scenario(const Grid1D& grid, const Potential1D& W,
                                  const std::map<int, cplx>& F_positive, double omega,
                                  double kappa, int N) {
  if (!(omega > 0.0)) throw InvalidArgument("floquet: omega must be positive");
  if (!W.value) throw InvalidArgument("floquet: potential W is missing");
  std::map<int, cplx> F;
  for (const auto& [n, f] : F_positive) {
    if (n == 0) {
      if (f != cplx(0.0)) throw InvalidArgument("floquet: field must have zero mean (F_0 != 0)");
      continue;
    }
    if (n < 0) throw InvalidArgument("floquet: pass F_n for n >= 1 only");
    F[n] = f;
    F[-n] = std::conj(f);
  }

  double qmax = 0.0;
  for (const auto& [n, f] : F) qmax += std::abs(f) / (n * n * omega * omega);
  if (std::abs(kappa) * qmax > 5.0 * grid.h)
    throw InvalidArgument("floquet: drive excursion kappa*max|q| exceeds 5 grid spacings");

  const int n = grid.n;
  RealVector w(n), dw(n), dw_exact(n);
  for (int i = 0; i < n; ++i) w[i] = W.value(grid.x(i));
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n, im = (i + n - 1) % n;
    dw[i] = (w[ip] - w[im]) / (2.0 * grid.h);
    dw_exact[i] = W.derivative ? W.derivative(grid.x(i)) : dw[i];
  }

  HermitianOperator H0 = schrodinger_1d(grid, w);
  const double E0 = H0.eigenvalues()[0];
  State psi = State::normalize(H0.eig().vectors().col(0));

  std::map<int, Matrix> vhat;
  const Matrix dW = Matrix(dw.cast<cplx>().asDiagonal());
  for (const auto& [k, f] : F) {
    const cplx ino(0.0, k * omega);
    vhat[k] = (f / (ino * ino)) * dW;
  }
  FloquetProblem problem{H0, std::move(vhat), omega, 1, kappa};
  problem.N = N > 0 ? N : default_truncation(problem);
  problem.validate();

  return AcStarkScenario{grid,  W,     w,     Potential1D::spline(grid, w),
                         dw,    dw_exact, std::move(F), omega,
                         kappa, H0,    std::move(psi), E0,
                         std::move(problem)};
}

double eacs_width(const AcStarkScenario& sc, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("floquet: eta must be positive");
  const Vector dpsi = sc.dW_exact.cast<cplx>().cwiseProduct(sc.psi.vec());
  const WeightedSpectrum ws = spectral_weights(sc.H0, dpsi);
  const double w4 = std::pow(sc.omega, 4);
  double sum = 0.0;
  for (const auto& [n, f] : sc.F) {
    const double n4 = std::pow(double(n), 4);
    sum += std::norm(f) / (w4 * n4) * ws.stieltjes(cplx(sc.E0 - n * sc.omega, eta)).imag();
  }
  return sc.kappa * sc.kappa * sum;
}

// ---------------------------------------------------------------- gauge check

namespace {

// Periodic grid with spectral derivatives; the 3-point stencil is not translation/boost
// covariant, so the two frames would only agree up to O(h^2) with it.
class SpectralGrid {
 public:
  explicit SpectralGrid(const Grid1D& g) : n_(g.n), k_(g.n) {
    const double dk = 2.0 * kPi / (g.n * g.h);
    for (int j = 0; j < n_; ++j) k_[j] = dk * (j < (n_ + 1) / 2 ? j : j - n_);
    kmax_ = kPi / g.h;
  }
  double kinetic_max() const { return 0.5 * kmax_ * kmax_; }

  Vector kinetic(const Vector& v) const {
    std::vector<cplx> in(v.data(), v.data() + n_), out;
    fft_.fwd(out, in);
    for (int j = 0; j < n_; ++j) out[j] *= 0.5 * k_[j] * k_[j];
    fft_.inv(in, out);
    return Eigen::Map<Vector>(in.data(), n_);
  }
  /// f(x - Q)
  Vector shift(const Vector& v, double Q) const {
    std::vector<cplx> in(v.data(), v.data() + n_), out;
    fft_.fwd(out, in);
    for (int j = 0; j < n_; ++j) out[j] *= std::polar(1.0, -k_[j] * Q);
    fft_.inv(in, out);
    return Eigen::Map<Vector>(in.data(), n_);
  }

 private:
  int n_;
  std::vector<double> k_;
  double kmax_;
  mutable Eigen::FFT<double> fft_;
};

// exp(-i dt (T + diag(V))) v by a Chebyshev series, accurate to roundoff.
Vector chebyshev_step(const SpectralGrid& sg, const RealVector& V, const Vector& v, double dt) {
  const double emin = V.minCoeff(), emax = sg.kinetic_max() + V.maxCoeff();
  const double c = 0.5 * (emax + emin), r = 0.5 * (emax - emin) * 1.01 + 1e-12;
  const double x = dt * r;
  auto Hs = [&](const Vector& u) -> Vector {
    return (sg.kinetic(u) + V.cast<cplx>().cwiseProduct(u) - c * u) / r;
  };
  Vector t_prev = v, t_cur = Hs(v);
  Vector acc = std::cyl_bessel_j(0.0, x) * v + 2.0 * cplx(0, -1) * std::cyl_bessel_j(1.0, x) * t_cur;
  cplx ik = cplx(0, -1);
  const int kmax = static_cast<int>(x) + 200;
  for (int k = 2; k < kmax; ++k) {
    Vector t_next = 2.0 * Hs(t_cur) - t_prev;
    ik *= cplx(0, -1);
    const double jk = std::cyl_bessel_j(double(k), x);
    acc += 2.0 * ik * jk * t_next;
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
    if (k > x && std::abs(jk) < 1e-17) break;
  }
  return std::polar(1.0, -dt * c) * acc;
}

double edge_probability(const Vector& v) {
  const Eigen::Index n = v.size(), m = std::max<Eigen::Index>(1, n / 10);
  return v.head(m).squaredNorm() + v.tail(m).squaredNorm();
}

}  // namespace

GaugeReport gauge_equivalence_check(const AcStarkScenario& sc, double t0, double t1, int n_steps) {
  if (n_steps <= 0) throw InvalidArgument("floquet: gauge check needs a positive step count");
  // Only the drive period constrains the step: the kinetic part is exponentiated exactly.
  const int need = min_steps(t0, t1, sc.omega, 0.0, 20);
  if (n_steps < need)
    throw InvalidArgument("floquet: gauge check needs at least " + std::to_string(need) + " steps");

  const Grid1D& g = sc.grid;
  const SpectralGrid sg(g);
  RealVector x(g.n);
  for (int i = 0; i < g.n; ++i) x[i] = g.x(i);
  const double kap = sc.kappa;

  auto S = [&](double t, const Vector& f, double phase) -> Vector {
    const double Q = kap * sc.q(t), P = kap * sc.qdot(t);
    Vector out = sg.shift(f, Q);
    for (int i = 0; i < g.n; ++i) out[i] *= std::polar(1.0, phase - 0.5 * Q * P + P * x[i]);
    return out;
  };

  // phi' = (Q'P - P'Q)/2 - (P^2/2 - kappa F Q) = kappa F Q / 2 with Q = kappa q, P = Q'.
  auto rate = [&](double t) { return 0.5 * kap * sc.field(t) * kap * sc.q(t); };
  GaugeReport rep;
  rep.steps = n_steps;
  rep.phase = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(rate, t0, t1, 15, 1e-14);

  const double dt = (t1 - t0) / n_steps;
  Vector fall = sc.psi.vec();
  Vector lab = S(t0, fall, 0.0);
  RealVector Vf(g.n), Vl(g.n);
  for (int k = 0; k < n_steps; ++k) {
    const double tm = t0 + (k + 0.5) * dt;
    const double Q = kap * sc.q(tm), Ft = sc.field(tm);
    for (int i = 0; i < g.n; ++i) {
      Vf[i] = sc.W.value(x[i] + Q);
      Vl[i] = -kap * Ft * x[i] + sc.W_samples[i];
    }
    fall = chebyshev_step(sg, Vf, fall, dt);
    lab = chebyshev_step(sg, Vl, lab, dt);
  }
  rep.leakage = std::max(edge_probability(fall), edge_probability(lab));
  if (rep.leakage > 1e-6)
    throw NumericalFailure("floquet: boundary contamination in gauge check (edge probability " +
                           std::to_string(rep.leakage) + "); enlarge the box");
  rep.residual = (S(t1, fall, rep.phase) - lab).norm();
  return rep;
}

GaugeConvergence gauge_convergence(const AcStarkScenario& sc, double t0, double t1,
                                   const std::vector<int>& steps) {
  GaugeConvergence c;
  std::vector<double> lx, ly;
  for (int m : steps) {
    const GaugeReport r = gauge_equivalence_check(sc, t0, t1, m);
    c.steps.push_back(m);
    c.residuals.push_back(r.residual);
    if (r.residual > 0.0) {
      lx.push_back(std::log(double(m)));
      ly.push_back(std::log(r.residual));
    }
  }
  if (lx.size() >= 2) c.order = -linear_fit(lx, ly).first;
  return c;
}

}  // namespace sojourn
