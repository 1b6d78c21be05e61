#include "sojourn/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "sojourn/errors.hpp"

namespace sojourn {

namespace {
constexpr double kPi = std::numbers::pi;
}

LorentzianModel::LorentzianModel(double e_r, double gamma) : E_r(e_r), Gamma(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InvalidArgument("models: Lorentzian Gamma must be positive");
}

double lorentzian_f(const LorentzianModel& m, double lambda, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("models: eps must be positive");
  const double d = lambda - m.E_r, s = eps + m.Gamma;
  return 2.0 * eps * s / (d * d + s * s);
}

double lorentzian_width(const LorentzianModel& m, double lambda) {
  return std::hypot(m.Gamma, lambda - m.E_r);
}

cplx lorentzian_amplitude(const LorentzianModel& m, double t) {
  return std::exp(cplx(-m.Gamma * std::abs(t), -m.E_r * t));
}

cplx lorentzian_resolvent(const LorentzianModel& m, cplx z) {
  if (!(z.imag() > 0.0)) throw InvalidArgument("models: Lorentzian resolvent needs Im z > 0");
  return 1.0 / (cplx(m.E_r, -m.Gamma) - z);
}

WidthResult lorentzian_energy_width(const LorentzianModel& m, double lambda) {
  WidthResult r;
  r.lambda = lambda;
  r.delta_e = lorentzian_width(m, lambda);
  r.f_at_solution = lorentzian_f(m, lambda, r.delta_e);
  return r;
}

SpectralMeasure lorentzian_discretize(const LorentzianModel& m, int n, double cutoff) {
  if (n < 1) throw InvalidArgument("models: Lorentzian discretization needs n >= 1");
  if (!(cutoff > 0.0)) throw InvalidArgument("models: cutoff must be positive");
  std::vector<SpectralPoint> pts(n);
  for (int k = 0; k < n; ++k) {
    const double u = (k + 0.5) / n;
    const double e = m.Gamma * std::tan(kPi * (u - 0.5));
    pts[k] = {m.E_r + std::clamp(e, -cutoff, cutoff), 1.0 / n};
  }
  return SpectralMeasure::from_points(std::move(pts), 0.0);
}

LemmaReport lorentzian_lemma_check(const LorentzianModel& m, double lambda, double eps,
                                   double horizon, double tol) {
  const Amplitude a = [m](double t) { return lorentzian_amplitude(m, t); };
  // |a|^2 = e^{-2 Gamma |t|} has no oscillation; Gamma sets the resolution scale.
  return lemma_bound_check(a, m.Gamma, lorentzian_f(m, lambda, eps), eps, horizon,
                           Envelope{1.0, m.Gamma}, tol);
}

// ---------------------------------------------------------------- Wigner-Weisskopf

void WignerWeisskopfSpec::validate() const {
  if (!(band_lo < E0 && E0 < band_hi))
    throw InvalidArgument("models: Wigner-Weisskopf E0 must lie inside the band");
  if (n_levels < 1) throw InvalidArgument("models: n_levels must be positive");
  if (!coupling) throw InvalidArgument("models: coupling form factor is missing");
  const double s = spacing();
  const double pos = (E0 - band_lo) / s - 0.5;
  const double scale = std::max({std::abs(band_lo), std::abs(band_hi), std::abs(E0)});
  if (std::abs(pos - std::round(pos)) * s <= 1e-9 * scale)
    throw InvalidArgument("models: E0 coincides with a band level; shift E0 or change n_levels");
}

PerturbedFamily wigner_weisskopf(const WignerWeisskopfSpec& spec) {
  spec.validate();
  const int n = spec.n_levels;
  const double sq = std::sqrt(spec.spacing());
  RealVector diag(n + 1);
  RealMatrix V = RealMatrix::Zero(n + 1, n + 1);
  diag[0] = spec.E0;
  for (int m = 0; m < n; ++m) {
    const double e = spec.level(m);
    diag[m + 1] = e;
    V(0, m + 1) = V(m + 1, 0) = spec.coupling(e) * sq;
  }
  return PerturbedFamily(HermitianOperator::diagonal(diag), Matrix(V.cast<cplx>()),
                         State::basis(n + 1, 0), spec.E0);
}

PerturbedFamily lorentzian_embedding(const LorentzianModel& m, int n_levels, double half_band) {
  WignerWeisskopfSpec spec;
  spec.E0 = m.E_r;
  spec.band_lo = m.E_r - half_band;
  spec.band_hi = m.E_r + half_band;
  spec.n_levels = n_levels;
  const double g = std::sqrt(m.Gamma / kPi);
  spec.coupling = [g](double) { return g; };
  return wigner_weisskopf(spec);
}

// ---------------------------------------------------------------- lattices

HermitianOperator free_chain(int L, double hopping, Boundary bc) {
  if (L < 2) throw InvalidArgument("models: chain needs at least 2 sites");
  RealMatrix H = RealMatrix::Zero(L, L);
  for (int i = 0; i + 1 < L; ++i) H(i, i + 1) = H(i + 1, i) = hopping;
  if (bc == Boundary::Periodic && L > 2) H(0, L - 1) = H(L - 1, 0) = hopping;
  return HermitianOperator(H);
}

namespace {

RealMatrix chain_with_defect(int L, double hopping, double defect_energy, double coupling,
                             int site) {
  if (L < 200) throw InvalidArgument("models: tight-binding chain needs L >= 200");
  RealMatrix H = RealMatrix::Zero(L + 1, L + 1);
  for (int i = 0; i + 1 < L; ++i) H(i, i + 1) = H(i + 1, i) = hopping;
  H(L, L) = defect_energy;
  H(L, site) = H(site, L) = coupling;
  return H;
}

}  // namespace

TightBindingModel tight_binding_defect(int L, double hopping, double defect_energy,
                                       double coupling) {
  const int site = L / 2;
  return {HermitianOperator(chain_with_defect(L, hopping, defect_energy, coupling, site)),
          State::basis(L + 1, L), site};
}

PerturbedFamily tight_binding_family(int L, double hopping, double defect_energy) {
  const int site = L / 2;
  RealMatrix H0 = chain_with_defect(L, hopping, defect_energy, 0.0, site);
  RealMatrix V = RealMatrix::Zero(L + 1, L + 1);
  V(L, site) = V(site, L) = 1.0;
  return PerturbedFamily(HermitianOperator(H0), Matrix(V.cast<cplx>()), State::basis(L + 1, L),
                         defect_energy);
}

Potential1D Potential1D::spline(const Grid1D& grid, const RealVector& samples) {
  if (samples.size() != grid.n || grid.n < 4)
    throw InvalidArgument("models: spline needs one sample per grid point (n >= 4)");
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  auto s = std::make_shared<Spline>(samples.data(), samples.size(), grid.x_min, grid.h);
  Potential1D p;
  p.value = [s](double x) { return (*s)(x); };
  p.derivative = [s](double x) { return s->prime(x); };
  return p;
}

HermitianOperator schrodinger_1d(const Grid1D& grid, const RealVector& W) {
  const int n = grid.n;
  if (n < 3) throw InvalidArgument("models: grid needs at least 3 points");
  if (W.size() != n) throw InvalidArgument("models: potential length does not match grid");
  if (!(grid.h > 0.0)) throw InvalidArgument("models: grid spacing must be positive");
  const double c = 0.5 / (grid.h * grid.h);
  RealMatrix H = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = 2.0 * c + W[i];
    if (i + 1 < n) H(i, i + 1) = H(i + 1, i) = -c;
  }
  if (grid.bc == Boundary::Periodic) H(0, n - 1) = H(n - 1, 0) = -c;
  return HermitianOperator(H);
}

HermitianOperator schrodinger_1d(const Grid1D& grid, const Potential1D& W) {
  RealVector w(grid.n);
  for (int i = 0; i < grid.n; ++i) w[i] = W.value(grid.x(i));
  return schrodinger_1d(grid, w);
}

}  // namespace sojourn
