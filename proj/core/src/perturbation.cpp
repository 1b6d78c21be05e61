#include "sojourn/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sojourn/errors.hpp"
#include "sojourn/sojourn_time.hpp"

namespace sojourn {

PerturbedFamily::PerturbedFamily(HermitianOperator H0, Matrix V0, State psi, double E0)
    : PerturbedFamily(std::move(H0), CouplingMap([V0 = std::move(V0)](double) { return V0; }),
                      std::move(psi), E0) {}

PerturbedFamily::PerturbedFamily(HermitianOperator H0, CouplingMap V, State psi, double E0)
    : H0_(std::move(H0)), V_(std::move(V)), psi_(std::move(psi)), E0_(E0) {
  validate();
}

void PerturbedFamily::validate() {
  if (psi_.dim() != H0_.dim())
    throw InvalidArgument("perturbation: psi does not match the dimension of H0");
  if (H0_.dim() < 2) throw InvalidArgument("perturbation: H0 needs dimension >= 2");
  const double scale = std::max(H0_.scale(), 1e-300);
  const double res = residual_norm(H0_, psi_, E0_);
  if (res > 1e-10 * scale)
    throw InvalidArgument("perturbation: psi is not an eigenvector of H0 at E0 (residual " +
                          std::to_string(res) + ")");
  const RealVector& e = H0_.eigenvalues();
  int at_e0 = 0;
  gap_ = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    const double d = std::abs(e[k] - E0_);
    if (d <= 1e-9 * scale) ++at_e0;
    else gap_ = std::min(gap_, d);
  }
  if (at_e0 != 1) throw InvalidArgument("perturbation: E0 is not a simple eigenvalue of H0");

  const Matrix v0 = V_(0.0);
  if (v0.rows() != H0_.dim() || v0.cols() != H0_.dim())
    throw InvalidArgument("perturbation: V has the wrong shape");
  if (linalg::hermiticity_defect(v0) > 1e-12 * std::max(linalg::max_abs(v0), 1e-300))
    throw InvalidArgument("perturbation: V(0) is not Hermitian");

  reduced_ = std::make_shared<const ReducedOperator>(H0_, psi_);
  const RealVector& r = reduced_->op().eigenvalues();
  bandwidth_ = r[r.size() - 1] - r[0];
  // Local level spacing: median of the gaps among the ~21 levels closest to E0.
  std::vector<double> near(r.data(), r.data() + r.size());
  std::sort(near.begin(), near.end(),
            [&](double a, double b) { return std::abs(a - E0_) < std::abs(b - E0_); });
  near.resize(std::min<std::size_t>(near.size(), 21));
  std::sort(near.begin(), near.end());
  std::vector<double> gaps;
  for (std::size_t k = 1; k < near.size(); ++k) gaps.push_back(near[k] - near[k - 1]);
  if (gaps.empty()) {
    spacing_ = std::numeric_limits<double>::infinity();
  } else {
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    spacing_ = gaps[gaps.size() / 2];
  }
}

Matrix PerturbedFamily::V(double kappa) const {
  Matrix v = V_(kappa);
  if (v.rows() != H0_.dim() || v.cols() != H0_.dim())
    throw InvalidArgument("perturbation: V(kappa) has the wrong shape");
  return v;
}

HermitianOperator PerturbedFamily::H(double kappa) const {
  return HermitianOperator(Matrix(H0_.matrix() + kappa * V(kappa)));
}

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("perturbation: eta must be positive");
}

}  // namespace

double lamb_shift_lambda2(const PerturbedFamily& fam, double kappa, double eta) {
  check_eta(eta);
  if (kappa == 0.0) return fam.E0();
  const Vector vpsi = fam.V(kappa) * fam.psi().vec();
  const double first = fam.psi().vec().dot(vpsi).real();
  const cplx second = fam.reduced().expectation(vpsi, cplx(fam.E0(), eta));
  return fam.E0() + kappa * first - kappa * kappa * second.real();
}

FgrResult fgr_width(const PerturbedFamily& fam, double kappa, double eta) {
  check_eta(eta);
  FgrResult r;
  r.kappa = kappa;
  r.eta_used = eta;
  const Vector v0psi = fam.V(0.0) * fam.psi().vec();
  r.gamma_fgr = kappa * kappa * fam.reduced().expectation(v0psi, cplx(fam.E0(), eta)).imag();
  r.lambda2 = lamb_shift_lambda2(fam, kappa, eta);
  return r;
}

EtaWindow admissible_window(const PerturbedFamily& fam, double floor_factor,
                            double ceiling_fraction) {
  EtaWindow w;
  w.floor_factor = floor_factor;
  w.ceiling_fraction = ceiling_fraction;
  w.lo = floor_factor * fam.local_spacing();
  w.hi = ceiling_fraction * fam.bandwidth();
  return w;
}

std::vector<double> default_eta_list(const PerturbedFamily& fam, int count) {
  const EtaWindow w = admissible_window(fam);
  if (w.empty())
    throw NumericalFailure(
        "perturbation: admissible eta window is empty; refine the continuum grid (more levels)");
  const double hi = std::min(w.hi, 20.0 * fam.local_spacing());
  std::vector<double> etas(count);
  for (int i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : double(i) / (count - 1);
    etas[i] = hi * std::pow(w.lo / hi, s);
  }
  return etas;
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) throw InvalidArgument("perturbation: a linear fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw InvalidArgument("perturbation: degenerate abscissae in linear fit");
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

EtaFit eta_extrapolation(const PerturbedFamily& fam, double kappa, const std::vector<double>& etas,
                         const EtaWindow& window) {
  if (window.empty())
    throw NumericalFailure(
        "perturbation: admissible eta window is empty; refine the continuum grid (more levels)");
  if (etas.size() < 2) throw InvalidArgument("perturbation: eta_extrapolation needs >= 2 etas");
  for (double eta : etas) {
    if (eta < window.lo * (1 - 1e-12) || eta > window.hi * (1 + 1e-12)) {
      std::ostringstream msg;
      msg << "perturbation: eta = " << eta << " outside the admissible window [" << window.lo
          << ", " << window.hi << "]";
      throw InvalidArgument(msg.str());
    }
  }
  EtaFit fit;
  fit.window = window;
  fit.etas = etas;
  for (double eta : etas) fit.gammas.push_back(fgr_width(fam, kappa, eta).gamma_fgr);
  const auto [slope, intercept] = linear_fit(fit.etas, fit.gammas);
  fit.slope = slope;
  fit.gamma_limit = intercept;
  double ss = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double r = fit.gammas[i] - (intercept + slope * etas[i]);
    ss += r * r;
  }
  fit.quality = std::sqrt(ss / etas.size());
  return fit;
}

EtaFit eta_extrapolation(const PerturbedFamily& fam, double kappa, const std::vector<double>& etas) {
  return eta_extrapolation(fam, kappa, etas, admissible_window(fam));
}

SweepResult kappa_sweep(const PerturbedFamily& fam, const std::vector<double>& kappas, double eta,
                        const SweepOptions& opt) {
  SweepResult out;
  std::vector<double> lx, ly;
  for (double kappa : kappas) {
    SweepRow row;
    try {
      row.fgr = fgr_width(fam, kappa, eta);
      const SpectralMeasure mu = spectral_measure(fam.H(kappa), fam.psi());
      const WidthResult w = energy_width(mu, row.fgr.lambda2, opt.width);
      row.delta_e = w.delta_e;
      row.fgr.delta_e_exact = w.delta_e;
      row.sojourn_lb = w.delta_e > 0.0 ? 1.0 / w.delta_e : std::numeric_limits<double>::infinity();
      row.ratio = row.fgr.gamma_fgr > 0.0 ? row.delta_e / row.fgr.gamma_fgr
                                          : std::numeric_limits<double>::quiet_NaN();
      if (opt.sojourn && mu.size() > 1) {
        const double horizon = opt.horizon_fraction * heisenberg_time(mu);
        const SojournEstimate est = sojourn_truncated(mu, horizon);
        row.sojourn_trunc = est.value;
        row.recurrence_warning = est.recurrence_warning;
      }
    } catch (const SingularPoint& e) {
      throw SingularPoint("perturbation: at kappa = " + std::to_string(kappa) + ": " + e.what(),
                          e.eigenvalue());
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("perturbation: at kappa = " + std::to_string(kappa) + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("perturbation: at kappa = " + std::to_string(kappa) + ": " + e.what());
    }
    if (kappa > 0.0 && row.delta_e > 0.0) {
      lx.push_back(std::log(kappa));
      ly.push_back(std::log(row.delta_e));
    }
    out.rows.push_back(std::move(row));
  }
  if (lx.size() >= 2) {
    const auto [slope, intercept] = linear_fit(lx, ly);
    out.slope = slope;
    out.intercept = intercept;
  }
  return out;
}

}  // namespace sojourn
