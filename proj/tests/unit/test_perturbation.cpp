#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "oracles.hpp"
#include "sojourn/errors.hpp"
#include "sojourn/models.hpp"
#include "sojourn/perturbation.hpp"
#include "sojourn/width.hpp"

using namespace sojourn;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

WignerWeisskopfSpec flat_spec(double g, int n = 400) {
  WignerWeisskopfSpec s;
  s.E0 = 0.0;
  s.band_lo = -4.0;
  s.band_hi = 4.0;
  s.n_levels = n;
  s.coupling = [g](double) { return g; };
  return s;
}

// sum_m g(E_m)^2 spacing eta / ((E_m - E0)^2 + eta^2), summed directly over the model levels
double eta_sum(const WignerWeisskopfSpec& s, double eta) {
  double acc = 0.0;
  for (int m = 0; m < s.n_levels; ++m) {
    const double e = s.level(m), g = s.coupling(e);
    acc += g * g * s.spacing() * eta / ((e - s.E0) * (e - s.E0) + eta * eta);
  }
  return acc;
}

double eta_sum_real(const WignerWeisskopfSpec& s, double eta) {
  double acc = 0.0;
  for (int m = 0; m < s.n_levels; ++m) {
    const double e = s.level(m), g = s.coupling(e), d = e - s.E0;
    acc += g * g * s.spacing() * d / (d * d + eta * eta);
  }
  return acc;
}

double nearest_eigenvalue(const Matrix& H, double target) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  double best = es.eigenvalues()[0];
  for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()[k] - target) < std::abs(best - target)) best = es.eigenvalues()[k];
  return best;
}

}  // namespace

TEST_CASE("perturbed family validation") {
  RealVector d(3);
  d << 0.0, 1.0, 2.0;
  const HermitianOperator H0 = HermitianOperator::diagonal(d);
  const Matrix V = Matrix::Ones(3, 3);
  CHECK_NOTHROW(PerturbedFamily(H0, V, State::basis(3, 0), 0.0));
  CHECK_THROWS_AS(PerturbedFamily(H0, V, State::basis(3, 0), 0.5), InvalidArgument);
  Vector mixed(3);
  mixed << 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(PerturbedFamily(H0, V, State::normalize(mixed), 0.0), InvalidArgument);
  RealVector dd(3);
  dd << 0.0, 0.0, 2.0;
  CHECK_THROWS_AS(PerturbedFamily(HermitianOperator::diagonal(dd), V, State::basis(3, 0), 0.0),
                  InvalidArgument);
  Matrix Vbad = Matrix::Zero(3, 3);
  Vbad(0, 1) = 1.0;
  CHECK_THROWS_AS(PerturbedFamily(H0, Vbad, State::basis(3, 0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(PerturbedFamily(H0, Matrix(Matrix::Ones(2, 2)), State::basis(3, 0), 0.0),
                  InvalidArgument);
  const PerturbedFamily fam(H0, V, State::basis(3, 0), 0.0);
  CHECK(fam.gap() == Approx(1.0));
  CHECK(fam.bandwidth() == Approx(1.0));
}

TEST_CASE("fgr width") {
  SUBCASE("no coupling to the complement") {
    RealVector d(3);
    d << 0.0, 1.0, 2.0;
    Matrix V = Matrix::Zero(3, 3);
    V(0, 0) = 0.7;
    V(1, 2) = V(2, 1) = 0.4;
    const PerturbedFamily fam(HermitianOperator::diagonal(d), V, State::basis(3, 0), 0.0);
    const FgrResult r = fgr_width(fam, 0.2, 0.05);
    CHECK(r.gamma_fgr == 0.0);
    CHECK(r.lambda2 == Approx(0.2 * 0.7));
  }
  SUBCASE("eta-regularized sum oracle and the golden-rule limit") {
    const WignerWeisskopfSpec s = flat_spec(1.3, 800);
    const PerturbedFamily fam = wigner_weisskopf(s);
    for (double eta : {0.04, 0.1, 0.3}) {
      const FgrResult r = fgr_width(fam, 0.1, eta);
      CHECK(r.gamma_fgr == Approx(0.01 * eta_sum(s, eta)).epsilon(1e-12));
      CHECK(r.gamma_fgr >= 0.0);
    }
    const double limit = eta_extrapolation(fam, 1.0, default_eta_list(fam)).gamma_limit;
    CHECK(limit == Approx(kPi * 1.3 * 1.3).epsilon(2e-3));
  }
  SUBCASE("n-independent coefficient") {
    const double a = fgr_width(wigner_weisskopf(flat_spec(1.0, 400)), 1.0, 0.2).gamma_fgr;
    const double b = fgr_width(wigner_weisskopf(flat_spec(1.0, 1600)), 1.0, 0.2).gamma_fgr;
    CHECK(a == Approx(b).epsilon(1e-3));
  }
  SUBCASE("finite point spectrum has no golden-rule width") {
    RealVector d(2);
    d << 0.0, 1.0;
    Matrix V = Matrix::Zero(2, 2);
    V(0, 1) = V(1, 0) = 1.0;
    const PerturbedFamily fam(HermitianOperator::diagonal(d), V, State::basis(2, 0), 0.0);
    CHECK(fgr_width(fam, 0.3, 1e-9).gamma_fgr <= 1e-9);
    // the exact width comes from the width module: a two-point measure
    const SpectralMeasure mu = spectral_measure(fam.H(0.3), fam.psi());
    CHECK(mu.size() == 2);
    CHECK(energy_width(mu, fam.E0()).delta_e > 0.0);
  }
  SUBCASE("eta must be positive") {
    const PerturbedFamily fam = wigner_weisskopf(flat_spec(1.0));
    CHECK_THROWS_AS(fgr_width(fam, 0.1, 0.0), InvalidArgument);
    CHECK_THROWS_AS(lamb_shift_lambda2(fam, 0.1, -1.0), InvalidArgument);
  }
  SUBCASE("phase of psi and the scale of V") {
    oracle::Rng rng(91);
    const Matrix A = oracle::random_hermitian(rng, 12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    const Vector psi = es.eigenvectors().col(5);
    const double E0 = es.eigenvalues()[5];
    const Matrix V = oracle::random_hermitian(rng, 12);
    const PerturbedFamily a(HermitianOperator(A), V, State(psi), E0);
    const PerturbedFamily b(HermitianOperator(A), V, State(Vector(psi * std::polar(1.0, 0.9))), E0);
    const PerturbedFamily c(HermitianOperator(A), Matrix(2.0 * V), State(psi), E0);
    const FgrResult ra = fgr_width(a, 0.1, 0.05), rb = fgr_width(b, 0.1, 0.05),
                    rc = fgr_width(c, 0.1, 0.05);
    CHECK(rb.gamma_fgr == Approx(ra.gamma_fgr).epsilon(1e-12));
    CHECK(rb.lambda2 == Approx(ra.lambda2).epsilon(1e-12));
    CHECK(rc.gamma_fgr == Approx(4.0 * ra.gamma_fgr).epsilon(1e-12));
  }
}

TEST_CASE("lamb shift") {
  SUBCASE("kappa = 0") {
    const PerturbedFamily fam = wigner_weisskopf(flat_spec(1.0));
    CHECK(lamb_shift_lambda2(fam, 0.0, 0.1) == fam.E0());
  }
  SUBCASE("symmetric model with <V> = 0") {
    WignerWeisskopfSpec s = flat_spec(1.0);
    s.E0 = 0.313;
    s.coupling = [](double e) { return 1.0 + 0.3 * e; };
    const PerturbedFamily fam = wigner_weisskopf(s);
    const double kappa = 0.2, eta = 0.1;
    CHECK(std::abs(fam.psi().vec().dot(fam.V(kappa) * fam.psi().vec())) == 0.0);
    // Re <v, (H - E0 - i eta)^{-1} v> = sum w (E - E0) / ((E - E0)^2 + eta^2)
    CHECK(lamb_shift_lambda2(fam, kappa, eta) ==
          Approx(s.E0 - kappa * kappa * eta_sum_real(s, eta)).epsilon(1e-12));
  }
  SUBCASE("second-order Rayleigh-Schroedinger on an isolated 3x3 toy") {
    RealVector d(3);
    d << 0.0, 1.0, -2.0;
    Matrix V(3, 3);
    V << 0.3, 0.5, cplx(0.2, 0.4), 0.5, -0.1, 0.7, cplx(0.2, -0.4), 0.7, 0.6;
    const PerturbedFamily fam(HermitianOperator::diagonal(d), V, State::basis(3, 0), 0.0);
    std::vector<double> lk, le;
    for (double kappa : {0.02, 0.01, 0.005, 0.0025}) {
      const Matrix H = fam.H0().matrix() + kappa * V;
      const double exact = nearest_eigenvalue(H, 0.0);
      const double err = std::abs(lamb_shift_lambda2(fam, kappa, 1e-9) - exact);
      lk.push_back(std::log(kappa));
      le.push_back(std::log(err));
    }
    CHECK(linear_fit(lk, le).first == Approx(3.0).epsilon(0.07));
  }
}

TEST_CASE("eta window and extrapolation") {
  SUBCASE("Lorentzian embedding recovers Gamma") {
    const LorentzianModel m(0.0, 0.5);
    const PerturbedFamily fam = lorentzian_embedding(m, 2000, 10.0);
    const EtaFit fit = eta_extrapolation(fam, 1.0, default_eta_list(fam));
    CHECK(fit.gamma_limit == Approx(m.Gamma).epsilon(0.01));
    CHECK(fit.window.lo == Approx(3.0 * fam.local_spacing()));
    CHECK(fit.window.hi == Approx(0.1 * fam.bandwidth()));
  }
  SUBCASE("zero coupling") {
    const PerturbedFamily fam = wigner_weisskopf(flat_spec(0.0));
    const EtaFit fit = eta_extrapolation(fam, 0.3, default_eta_list(fam));
    CHECK(std::abs(fit.gamma_limit) <= 1e-12);
  }
  SUBCASE("self-consistency of two eta lists") {
    // The fit residual only tracks the intercept error when the list spans about a decade;
    // over [c, 2c] the cubic curvature of gamma(eta) shifts the intercept by ~6x the residual.
    const PerturbedFamily fam = wigner_weisskopf(flat_spec(1.0, 2000));
    const EtaWindow w = admissible_window(fam);
    const double s = fam.local_spacing();
    std::vector<double> a, b;
    for (int i = 0; i < 6; ++i) {
      a.push_back(60.0 * s * std::pow(0.1, i / 5.0));
      b.push_back(0.5 * a.back());
    }
    REQUIRE(b.back() >= w.lo * (1 - 1e-12));
    const EtaFit fa = eta_extrapolation(fam, 1.0, a), fb = eta_extrapolation(fam, 1.0, b);
    CHECK(std::abs(fa.gamma_limit - fb.gamma_limit) <= 2.0 * std::max(fa.quality, fb.quality));
    CHECK(fa.gamma_limit == Approx(kPi).epsilon(1e-4));
  }
  SUBCASE("default list") {
    const PerturbedFamily fam = wigner_weisskopf(flat_spec(1.0, 800));
    const std::vector<double> etas = default_eta_list(fam);
    REQUIRE(etas.size() == 6);
    CHECK(etas.back() == Approx(3.0 * fam.local_spacing()));
    CHECK(etas.front() == Approx(20.0 * fam.local_spacing()));
    for (std::size_t i = 1; i < etas.size(); ++i) CHECK(etas[i] < etas[i - 1]);
  }
  SUBCASE("errors") {
    const PerturbedFamily fam = wigner_weisskopf(flat_spec(1.0, 400));
    CHECK_THROWS_AS(eta_extrapolation(fam, 1.0, {0.5 * fam.local_spacing(), 0.1}),
                    InvalidArgument);
    CHECK_THROWS_AS(eta_extrapolation(fam, 1.0, {0.1, 5.0}), InvalidArgument);
    // 4 levels on a band of width 8: spacing 2, the window [6, 0.6] is empty
    WignerWeisskopfSpec coarse = flat_spec(1.0, 4);
    coarse.E0 = 0.3;
    const PerturbedFamily cf = wigner_weisskopf(coarse);
    CHECK(admissible_window(cf).empty());
    CHECK_THROWS_WITH_AS(eta_extrapolation(cf, 1.0, {0.1, 0.2}),
                         doctest::Contains("refine the continuum grid"), NumericalFailure);
  }
}

TEST_CASE("kappa sweep") {
  const PerturbedFamily fam = wigner_weisskopf(flat_spec(1.0, 800));
  SUBCASE("rows, zero row and scaling") {
    const SweepResult r = kappa_sweep(fam, {0.05, 0.1, 0.2, 0.0}, 0.05);
    REQUIRE(r.rows.size() == 4);
    CHECK(r.rows[3].delta_e == 0.0);
    CHECK(std::isinf(r.rows[3].sojourn_lb));
    CHECK(r.slope == Approx(2.0).epsilon(0.05));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(r.rows[i].fgr.delta_e_exact);
      CHECK(r.rows[i].ratio == Approx(1.0).epsilon(0.1));
    }
  }
  SUBCASE("sojourn column") {
    SweepOptions opt;
    opt.sojourn = true;
    const SweepResult r = kappa_sweep(fam, {0.2}, 0.05, opt);
    REQUIRE(r.rows[0].sojourn_trunc);
    CHECK(*r.rows[0].sojourn_trunc >= 0.98 * r.rows[0].sojourn_lb);
  }
  SUBCASE("failures carry the kappa value") {
    RealVector d(3);
    d << 0.0, 1.0, 2.0;
    const CouplingMap bad = [](double k) {
      Matrix V = Matrix::Zero(3, 3);
      V(0, 1) = V(1, 0) = 1.0;
      if (k > 0.0) V(0, 2) = 1.0;  // loses hermiticity away from 0
      return V;
    };
    const PerturbedFamily f(HermitianOperator::diagonal(d), bad, State::basis(3, 0), 0.0);
    CHECK_THROWS_WITH_AS(kappa_sweep(f, {0.0, 0.25}, 0.1), doctest::Contains("kappa = 0.25"),
                         InvalidArgument);
  }
}
