#include "sojourn/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sojourn/errors.hpp"
#include "sojourn/sojourn_time.hpp"

namespace sojourn {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

// ---------------------------------------------------------------- FloquetProblem

int FloquetProblem::M() const {
  int m = 0;
  for (const auto& [n, v] : vhat)
    if (v.size() > 0 && linalg::max_abs(v) > 0.0) m = std::max(m, std::abs(n));
  return m;
}

double FloquetProblem::period() const { return kTwoPi / omega; }

Matrix FloquetProblem::coefficient(int n) const {
  auto it = vhat.find(n);
  if (it == vhat.end()) return Matrix::Zero(H0.dim(), H0.dim());
  return it->second;
}

Matrix FloquetProblem::hamiltonian(double t) const {
  Matrix h = H0.matrix();
  for (const auto& [n, v] : vhat) h += kappa * std::polar(1.0, n * omega * t) * v;
  return h;
}

TimeDependentH FloquetProblem::hamiltonian_fn() const {
  return [fp = *this](double t) { return fp.hamiltonian(t); };
}

void FloquetProblem::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw InvalidArgument("floquet: omega must be positive");
  const Eigen::Index d = H0.dim();
  for (const auto& [n, v] : vhat) {
    if (v.rows() != d || v.cols() != d)
      throw InvalidArgument("floquet: vhat(" + std::to_string(n) + ") has the wrong shape");
    const Matrix partner = coefficient(-n);
    const double scale = std::max(linalg::max_abs(v), 1.0);
    if ((partner - v.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw InvalidArgument("floquet: vhat(" + std::to_string(-n) + ") is not the adjoint of vhat(" +
                            std::to_string(n) + ")");
  }
  if (N < M())
    throw InvalidArgument("floquet: truncation N = " + std::to_string(N) +
                          " is below the drive order M = " + std::to_string(M()));
}

std::map<int, Matrix> symmetric_drive(const std::map<int, Matrix>& positive) {
  std::map<int, Matrix> out;
  for (const auto& [n, v] : positive) {
    if (n < 0) throw InvalidArgument("floquet: symmetric_drive takes n >= 0 only");
    out[n] = v;
    if (n > 0) out[-n] = v.adjoint();
  }
  return out;
}

int default_truncation(const FloquetProblem& fp, double target) {
  double vmax = 0.0;
  for (const auto& [n, v] : fp.vhat) vmax = std::max(vmax, v.operatorNorm());
  const int M = fp.M();
  const double need = std::abs(fp.kappa) * vmax / (fp.omega * target);
  return M + std::max(1, static_cast<int>(std::floor(need)) + 1);
}

namespace {

Matrix assemble(const FloquetProblem& fp) {
  const Eigen::Index d = fp.H0.dim();
  const int N = fp.N, B = 2 * N + 1;
  Matrix K = Matrix::Zero(B * d, B * d);
  for (int n = -N; n <= N; ++n) {
    const Eigen::Index r = (n + N) * d;
    K.block(r, r, d, d) = fp.H0.matrix();
    K.block(r, r, d, d).diagonal().array() += n * fp.omega;
    for (const auto& [k, v] : fp.vhat) {
      const int m = n - k;
      if (m < -N || m > N || fp.kappa == 0.0) continue;
      K.block(r, (m + N) * d, d, d) += fp.kappa * v;
    }
  }
  return K;
}

}  // namespace

HermitianOperator build_floquet(const FloquetProblem& fp) {
  fp.validate();
  const Matrix K = assemble(fp);
  if (linalg::is_real(K)) return HermitianOperator(RealMatrix(K.real()));
  return HermitianOperator(K);
}

Vector embed(const FloquetProblem& fp, const std::map<int, Vector>& harmonics) {
  const Eigen::Index d = fp.H0.dim();
  Vector out = Vector::Zero((2 * fp.N + 1) * d);
  for (const auto& [n, v] : harmonics) {
    if (std::abs(n) > fp.N)
      throw InvalidArgument("floquet: harmonic " + std::to_string(n) + " exceeds truncation N");
    if (v.size() != d) throw InvalidArgument("floquet: harmonic vector has the wrong length");
    out.segment((n + fp.N) * d, d) = v;
  }
  return out;
}

Vector evaluate(const FloquetProblem& fp, const Vector& extended, double t) {
  const Eigen::Index d = fp.H0.dim();
  Vector out = Vector::Zero(d);
  for (int n = -fp.N; n <= fp.N; ++n)
    out += std::polar(1.0, n * fp.omega * t) * extended.segment((n + fp.N) * d, d);
  return out;
}

// ---------------------------------------------------------------- Howland

HowlandReport howland_check(const FloquetProblem& fp, const std::map<int, Vector>& phi, double s,
                            int n_times, int steps_per_period, int margin) {
  return howland_check(fp, build_floquet(fp), phi, s, n_times, steps_per_period, margin);
}

HowlandReport howland_check(const FloquetProblem& fp, const HermitianOperator& K,
                            const std::map<int, Vector>& phi, double s, int n_times,
                            int steps_per_period, int margin) {
  fp.validate();
  if (K.dim() != (2 * fp.N + 1) * fp.H0.dim())
    throw InvalidArgument("floquet: K does not match the truncation of the problem");
  if (n_times < 1) throw InvalidArgument("floquet: n_times must be positive");
  for (const auto& [n, v] : phi)
    if (std::abs(n) > fp.N - margin)
      throw InvalidArgument("floquet: phi uses harmonic " + std::to_string(n) +
                            " beyond N - margin");
  const Vector Phi = embed(fp, phi);
  Vector c = K.project(Phi);
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -s * K.eigenvalues()[k]);
  const Vector evolved = K.expand(c);

  const double T = fp.period();
  const int n_steps = static_cast<int>(std::lround(std::abs(s) / T * steps_per_period));
  PropagatorOptions opt;
  opt.omega = fp.omega;
  const TimeDependentH H = fp.hamiltonian_fn();

  HowlandReport rep;
  for (int j = 0; j < n_times; ++j) {
    const double t = j * T / n_times;
    const Vector lhs = evaluate(fp, evolved, t + s);
    Vector rhs = evaluate(fp, Phi, t);
    if (n_steps > 0) rhs = propagate(H, rhs, t, t + s, n_steps, opt);
    const double r = (lhs - rhs).norm();
    rep.times.push_back(t);
    rep.residuals.push_back(r);
    rep.residual = std::max(rep.residual, r);
  }
  return rep;
}

// ---------------------------------------------------------------- averaged sojourn

AveragedSojourn averaged_sojourn(const FloquetProblem& fp, const State& psi, double horizon,
                                 int n_t0, int steps_per_period, double rel_tol) {
  if (fp.kappa == 0.0) {
    AveragedSojourn out;
    out.infinite = true;
    out.averaged = out.floquet = std::numeric_limits<double>::infinity();
    out.horizon = horizon;
    return out;
  }
  return averaged_sojourn(fp, build_floquet(fp), psi, horizon, n_t0, steps_per_period, rel_tol);
}

AveragedSojourn averaged_sojourn(const FloquetProblem& fp, const HermitianOperator& K,
                                 const State& psi, double horizon, int n_t0,
                                 int steps_per_period, double rel_tol) {
  fp.validate();
  if (!(horizon > 0.0)) throw InvalidArgument("floquet: horizon must be positive");
  if (n_t0 < 1 || steps_per_period % n_t0 != 0)
    throw InvalidArgument("floquet: steps_per_period must be a positive multiple of n_t0");
  if (psi.dim() != fp.H0.dim()) throw InvalidArgument("floquet: psi has the wrong dimension");
  AveragedSojourn out;
  if (fp.kappa == 0.0) {
    out.infinite = true;
    out.averaged = out.floquet = std::numeric_limits<double>::infinity();
    out.horizon = horizon;
    return out;
  }

  const PeriodicSteps steps(fp.hamiltonian_fn(), fp.omega, steps_per_period);
  const double dt = steps.dt();
  long n_s = static_cast<long>(std::ceil(horizon / dt));
  if (n_s % 2) ++n_s;
  out.horizon = n_s * dt;

  std::vector<double> g(n_s + 1);
  double total = 0.0;
  for (int j = 0; j < n_t0; ++j) {
    const long start = static_cast<long>(j) * steps_per_period / n_t0;
    g[0] = 1.0;
    steps.run(psi.vec(), start, n_s,
              [&](long i, const Vector& v) { g[i] = std::norm(psi.vec().dot(v)); });
    // Simpson on [0, horizon]; the t0 average of the s < 0 half equals that of s > 0.
    double s = g.front() + g.back();
    for (long i = 1; i < n_s; ++i) s += (i % 2 ? 4.0 : 2.0) * g[i];
    const double value = 2.0 * s * dt / 3.0;
    out.per_t0.push_back(value);
    total += value;
  }
  out.averaged = total / n_t0;

  const State Phi(embed(fp, {{0, psi.vec()}}));
  out.floquet = sojourn_truncated(spectral_measure(K, Phi), out.horizon).value;
  out.jensen_ok = out.floquet <= out.averaged * (1.0 + rel_tol);
  return out;
}

// ---------------------------------------------------------------- golden rule

void check_non_resonance(const FloquetProblem& fp, double E0, const State& psi) {
  const RealVector& e = fp.H0.eigenvalues();
  const double tol = 1e-9 * std::max(1.0, fp.H0.scale());
  if (residual_norm(fp.H0, psi, E0) > 1e-10 * std::max(1.0, fp.H0.scale()))
    throw InvalidArgument("floquet: psi is not an eigenvector of H0 at E0");
  int at_e0 = 0;
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    if (std::abs(e[k] - E0) <= tol && ++at_e0 > 1) {
      throw NonResonanceViolation("floquet: E0 is degenerate in H0", e[k], 0);
    }
    const long n = std::lround((e[k] - E0) / fp.omega);
    if (n != 0 && std::abs(E0 + n * fp.omega - e[k]) <= tol) {
      std::ostringstream msg;
      msg << "floquet: non-resonance violated, E0 + " << n << " omega hits eigenvalue " << e[k];
      throw NonResonanceViolation(msg.str(), e[k], static_cast<int>(n));
    }
  }
}

double floquet_fgr(const FloquetProblem& fp, const State& psi, double E0, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("floquet: eta must be positive");
  fp.validate();
  check_non_resonance(fp, E0, psi);
  double sum = 0.0;
  const int M = fp.M();
  for (int n = -M; n <= M; ++n) {
    auto it = fp.vhat.find(n);
    if (it == fp.vhat.end()) continue;
    const Vector v = it->second * psi.vec();
    if (v.norm() == 0.0) continue;
    const cplx z(E0 - n * fp.omega, eta);
    if (n == 0) sum += ReducedOperator(fp.H0, psi).expectation(v, z).imag();
    else sum += resolvent_expectation(fp.H0, v, z).imag();
  }
  return fp.kappa * fp.kappa * sum;
}

PerturbedFamily floquet_family(const FloquetProblem& fp, const State& psi, double E0) {
  FloquetProblem bare = fp;
  bare.kappa = 0.0;
  fp.validate();
  const HermitianOperator K0 = build_floquet(bare);
  FloquetProblem unit = fp;
  unit.kappa = 1.0;
  const Matrix coupling = assemble(unit) - K0.matrix();
  return PerturbedFamily(K0, coupling, State(embed(fp, {{0, psi.vec()}})), E0);
}

}  // namespace sojourn
