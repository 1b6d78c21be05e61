#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sojourn/errors.hpp"
#include "sojourn/models.hpp"
#include "sojourn/perturbation.hpp"
#include "sojourn/width.hpp"

using namespace sojourn;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Lorentzian closed forms") {
  const LorentzianModel m(-0.4, 0.25);
  CHECK_THROWS_AS(LorentzianModel(0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(LorentzianModel(0.0, -1.0), InvalidArgument);
  SUBCASE("f at the width equals one") {
    for (double lambda : {-3.0, -0.4, 0.0, 2.5}) {
      const double w = lorentzian_width(m, lambda);
      CHECK(lorentzian_f(m, lambda, w) == Approx(1.0).epsilon(1e-14));
      CHECK(w == Approx(std::sqrt(0.0625 + (lambda + 0.4) * (lambda + 0.4))));
    }
    CHECK(lorentzian_f(m, m.E_r, m.Gamma) == Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("Gamma = 1, unit detuning") {
    CHECK(lorentzian_width(LorentzianModel(0.0, 1.0), 1.0) == Approx(std::sqrt(2.0)));
  }
  SUBCASE("large eps limit") {
    CHECK(lorentzian_f(m, 0.3, 1e8) == Approx(2.0).epsilon(1e-7));
  }
  SUBCASE("f is 2 eps Im of the resolvent") {
    for (double eps : {0.01, 0.3, 4.0}) {
      const cplx R = lorentzian_resolvent(m, cplx(0.1, eps));
      CHECK(2.0 * eps * R.imag() == Approx(lorentzian_f(m, 0.1, eps)).epsilon(1e-14));
    }
  }
  SUBCASE("resolvent is the Stieltjes transform of the density") {
    const cplx z(0.3, 0.2);
    const double re = oracle::integrate(
        [&](double u) {
          // E = E_r + Gamma tan u maps the real line to (-pi/2, pi/2) with density 1/pi
          const double E = m.E_r + m.Gamma * std::tan(u);
          return (1.0 / (cplx(E, 0.0) - z)).real() / kPi;
        },
        -kPi / 2, kPi / 2);
    const double im = oracle::integrate(
        [&](double u) {
          const double E = m.E_r + m.Gamma * std::tan(u);
          return (1.0 / (cplx(E, 0.0) - z)).imag() / kPi;
        },
        -kPi / 2, kPi / 2);
    CHECK(std::abs(cplx(re, im) - lorentzian_resolvent(m, z)) <= 1e-10);
  }
  SUBCASE("amplitude") {
    CHECK(std::abs(lorentzian_amplitude(m, 2.0) - std::exp(cplx(-0.5, 0.8))) <= 1e-15);
    CHECK(std::abs(lorentzian_amplitude(m, -2.0) - std::exp(cplx(-0.5, -0.8))) <= 1e-15);
  }
}

TEST_CASE("Lorentzian discretization") {
  const LorentzianModel m(0.3, 0.7);
  SUBCASE("weights") {
    const SpectralMeasure mu = lorentzian_discretize(m, 1001, 50.0 * m.Gamma);
    CHECK(mu.total_weight() == Approx(1.0).epsilon(1e-14));
    CHECK(mu.min_energy() >= m.E_r - 50.0 * m.Gamma - 1e-12);
    CHECK(mu.max_energy() <= m.E_r + 50.0 * m.Gamma + 1e-12);
  }
  SUBCASE("n = 4001 with cutoff 50 Gamma") {
    const SpectralMeasure mu = lorentzian_discretize(m, 4001, 50.0 * m.Gamma);
    CHECK(std::abs(energy_width(mu, m.E_r).delta_e - m.Gamma) <= 1e-3 * m.Gamma);
  }
  SUBCASE("error decreases with n, at least halving per doubling") {
    const double lambda = m.E_r + 1.0, exact = lorentzian_width(m, lambda);
    auto err = [&](int n) {
      return std::abs(
          energy_width(lorentzian_discretize(m, n, 1e300), lambda, 1e-14).delta_e - exact);
    };
    double prev = err(11);
    for (int n : {16, 22, 32, 45}) {
      const double e = err(n);
      CHECK(e < prev);
      prev = e;
    }
    for (int n : {11, 16, 22}) {
      const double coarse = err(n), fine = err(2 * n);
      CHECK((fine <= 0.5 * coarse || fine <= 1e-12));
    }
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(lorentzian_discretize(m, 0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(lorentzian_discretize(m, 10, 0.0), InvalidArgument);
  }
}

TEST_CASE("Wigner-Weisskopf construction") {
  WignerWeisskopfSpec s;
  s.E0 = 0.0537;
  s.band_lo = -2.0;
  s.band_hi = 2.0;
  s.n_levels = 200;
  s.coupling = [](double e) { return 1.0 + e * e; };
  const PerturbedFamily fam = wigner_weisskopf(s);
  SUBCASE("spectrum and coupling") {
    const RealVector& e = fam.H0().eigenvalues();
    REQUIRE(e.size() == 201);
    int at_e0 = 0;
    for (Eigen::Index k = 0; k < e.size(); ++k)
      if (std::abs(e[k] - s.E0) < 1e-14) ++at_e0;
    CHECK(at_e0 == 1);
    CHECK(e[0] == Approx(-2.0 + 0.01));
    CHECK(e[200] == Approx(2.0 - 0.01));
    const Matrix V = fam.V(0.0);
    CHECK(linalg::hermiticity_defect(V) == 0.0);
    CHECK(V(0, 0) == cplx(0.0));
    // second level of the band sits at -2 + 1.5 spacing
    const double e1 = -2.0 + 1.5 * s.spacing();
    CHECK(V(0, 2).real() == Approx((1.0 + e1 * e1) * std::sqrt(s.spacing())).epsilon(1e-14));
    CHECK(fam.H0().reconstruction_residual() <= 1e-10 * 201 * fam.H0().scale());
  }
  SUBCASE("validation") {
    WignerWeisskopfSpec bad = s;
    bad.E0 = 3.0;
    CHECK_THROWS_AS(wigner_weisskopf(bad), InvalidArgument);
    bad = s;
    bad.E0 = s.level(17);
    CHECK_THROWS_AS(wigner_weisskopf(bad), InvalidArgument);
    bad = s;
    bad.n_levels = 0;
    CHECK_THROWS_AS(wigner_weisskopf(bad), InvalidArgument);
  }
  SUBCASE("coupling vanishing at E0 switches the golden rule off") {
    WignerWeisskopfSpec z = s;
    z.n_levels = 2000;
    z.coupling = [E0 = z.E0](double e) { return e - E0; };
    const PerturbedFamily f = wigner_weisskopf(z);
    const double g = eta_extrapolation(f, 1.0, default_eta_list(f)).gamma_limit;
    // g(E)^2 = (E - E0)^2 vanishes quadratically, the eta sum goes like eta * bandwidth
    CHECK(std::abs(g) <= 1e-2);
    const double g_flat = [&] {
      WignerWeisskopfSpec flat = z;
      flat.coupling = [](double) { return 1.0; };
      const PerturbedFamily ff = wigner_weisskopf(flat);
      return eta_extrapolation(ff, 1.0, default_eta_list(ff)).gamma_limit;
    }();
    CHECK(g_flat == Approx(kPi).epsilon(2e-3));
  }
  SUBCASE("Lorentzian embedding golden-rule width equals Gamma") {
    const PerturbedFamily f = lorentzian_embedding(LorentzianModel(0.0, 0.4), 2000, 10.0);
    CHECK(fgr_width(f, 1.0, 0.05).gamma_fgr == Approx(0.4).epsilon(0.01));
  }
}

TEST_CASE("chains") {
  SUBCASE("free chain, Dirichlet dispersion") {
    const int L = 60;
    const HermitianOperator H = free_chain(L, 0.8);
    std::vector<double> ref;
    for (int k = 1; k <= L; ++k) ref.push_back(1.6 * std::cos(kPi * k / (L + 1)));
    std::sort(ref.begin(), ref.end());
    for (int k = 0; k < L; ++k) CHECK(std::abs(H.eigenvalues()[k] - ref[k]) <= 1e-10);
  }
  SUBCASE("free chain, periodic dispersion") {
    const int L = 40;
    const HermitianOperator H = free_chain(L, 1.0, Boundary::Periodic);
    std::vector<double> ref;
    for (int k = 0; k < L; ++k) ref.push_back(2.0 * std::cos(2.0 * kPi * k / L));
    std::sort(ref.begin(), ref.end());
    for (int k = 0; k < L; ++k) CHECK(std::abs(H.eigenvalues()[k] - ref[k]) <= 1e-10);
  }
  SUBCASE("tight-binding defect") {
    CHECK_THROWS_AS(tight_binding_defect(100, 1.0, 0.3), InvalidArgument);
    const TightBindingModel tb = tight_binding_defect(200, 1.0, 0.3, 0.2);
    CHECK(tb.H.dim() == 201);
    CHECK(tb.defect.vec()[200] == cplx(1.0));
    CHECK(tb.H.matrix()(200, 200).real() == 0.3);
    CHECK(tb.H.matrix()(200, tb.coupled_site).real() == 0.2);
    const PerturbedFamily fam = tight_binding_family(200, 1.0, 0.3);
    CHECK(fam.E0() == 0.3);
    const Matrix H = fam.H(0.2).matrix();
    CHECK((H - tb.H.matrix()).cwiseAbs().maxCoeff() == 0.0);
    // the defect sits inside the band, so the golden rule gives a positive width
    CHECK(fgr_width(fam, 0.2, 0.1).gamma_fgr > 0.0);
  }
}

TEST_CASE("discretized Schroedinger operator") {
  SUBCASE("free Dirichlet grid") {
    const Grid1D g{0.0, 0.1, 50, Boundary::Dirichlet};
    const HermitianOperator H = schrodinger_1d(g, RealVector(RealVector::Zero(50)));
    for (int k = 1; k <= 50; ++k) {
      const double ref = (1.0 - std::cos(kPi * k / 51.0)) / (g.h * g.h);
      CHECK(std::abs(H.eigenvalues()[k - 1] - ref) <= 1e-10 * H.scale());
    }
  }
  SUBCASE("free periodic grid") {
    const Grid1D g{0.0, 0.2, 32, Boundary::Periodic};
    const HermitianOperator H = schrodinger_1d(g, RealVector(RealVector::Zero(32)));
    std::vector<double> ref;
    for (int k = 0; k < 32; ++k) ref.push_back((1.0 - std::cos(2.0 * kPi * k / 32.0)) / (g.h * g.h));
    std::sort(ref.begin(), ref.end());
    for (int k = 0; k < 32; ++k) CHECK(std::abs(H.eigenvalues()[k] - ref[k]) <= 1e-10 * H.scale());
  }
  SUBCASE("symmetric potential gives parity eigenvectors") {
    const Grid1D g{-3.0, 6.0 / 60.0, 61, Boundary::Dirichlet};
    Potential1D W;
    W.value = [](double x) { return 0.5 * x * x; };
    W.derivative = [](double x) { return x; };
    const HermitianOperator H = schrodinger_1d(g, W);
    const Matrix U = H.eig().vectors();
    for (int k = 0; k < 6; ++k) {
      double even = 0.0, odd = 0.0;
      for (int i = 0; i < 61; ++i) {
        even = std::max(even, std::abs(U(i, k) - U(60 - i, k)));
        odd = std::max(odd, std::abs(U(i, k) + U(60 - i, k)));
      }
      CHECK(std::min(even, odd) <= 1e-10);
    }
  }
  SUBCASE("argument checks") {
    const Grid1D g{0.0, 0.1, 10, Boundary::Periodic};
    CHECK_THROWS_AS(schrodinger_1d(g, RealVector(RealVector::Zero(9))), InvalidArgument);
    CHECK_THROWS_AS(schrodinger_1d(Grid1D{0.0, 0.1, 2, Boundary::Periodic},
                                   RealVector(RealVector::Zero(2))),
                    InvalidArgument);
  }
  SUBCASE("spline of samples") {
    const Grid1D g{-5.0, 0.05, 201, Boundary::Periodic};
    RealVector s(201);
    for (int i = 0; i < 201; ++i) s[i] = std::exp(-g.x(i) * g.x(i));
    const Potential1D W = Potential1D::spline(g, s);
    double err = 0.0, derr = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.0137) {
      err = std::max(err, std::abs(W.value(x) - std::exp(-x * x)));
      derr = std::max(derr, std::abs(W.derivative(x) + 2.0 * x * std::exp(-x * x)));
    }
    CHECK(err <= 1e-5);
    CHECK(derr <= 1e-3);
  }
}
