#include "sojourn/multistate.hpp"

#include <cmath>
#include <limits>

#include "sojourn/errors.hpp"
#include "sojourn/sojourn_time.hpp"
#include "sojourn/width.hpp"

namespace sojourn {

void TwoChannelModel::validate() const {
  if (V.rows() != H1.dim() || V.cols() != H2.dim())
    throw InvalidArgument("multistate: coupling must be d1 x d2 (" + std::to_string(H1.dim()) +
                          " x " + std::to_string(H2.dim()) + ")");
  if (psi0.dim() != H1.dim()) throw InvalidArgument("multistate: psi0 must live in channel 1");
  const double scale = std::max(H1.scale(), 1e-300);
  if (residual_norm(H1, psi0, E0) > 1e-10 * scale)
    throw InvalidArgument("multistate: psi0 is not an eigenvector of H1 at E0");
  int count = 0;
  for (Eigen::Index k = 0; k < H1.dim(); ++k)
    if (std::abs(H1.eigenvalues()[k] - E0) <= 1e-9 * scale) ++count;
  if (count != 1) throw InvalidArgument("multistate: E0 is not simple in H1");
}

namespace {

Matrix assemble(const TwoChannelModel& m, double kappa) {
  const Eigen::Index d1 = m.H1.dim(), d2 = m.H2.dim();
  Matrix H = Matrix::Zero(d1 + d2, d1 + d2);
  H.topLeftCorner(d1, d1) = m.H1.matrix();
  H.bottomRightCorner(d2, d2) = m.H2.matrix();
  H.topRightCorner(d1, d2) = kappa * m.V;
  H.bottomLeftCorner(d2, d1) = kappa * m.V.adjoint();
  return H;
}

HermitianOperator as_operator(const Matrix& H) {
  if (linalg::is_real(H)) return HermitianOperator(RealMatrix(H.real()));
  return HermitianOperator(H);
}

}  // namespace

HermitianOperator build_block(const TwoChannelModel& m) {
  m.validate();
  return as_operator(assemble(m, m.kappa));
}

State embed_bound(const TwoChannelModel& m) {
  Vector v = Vector::Zero(m.dim());
  v.head(m.H1.dim()) = m.psi0.vec();
  return State(std::move(v));
}

double ms_fgr(const TwoChannelModel& m, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("multistate: eta must be positive");
  m.validate();
  const Vector w = m.V.adjoint() * m.psi0.vec();
  return m.kappa * m.kappa * resolvent_expectation(m.H2, w, cplx(m.E0, eta)).imag();
}

PerturbedFamily to_family(const TwoChannelModel& m) {
  m.validate();
  const Matrix H0 = assemble(m, 0.0);
  const Matrix V = assemble(m, 1.0) - H0;
  return PerturbedFamily(as_operator(H0), V, embed_bound(m), m.E0);
}

MultistateReport ms_pipeline(const TwoChannelModel& m, double eta, double horizon_fraction,
                             double rel_tol, const WidthOptions& opt) {
  MultistateReport r;
  const PerturbedFamily fam = to_family(m);
  const FgrResult fgr = fgr_width(fam, m.kappa, eta);
  r.lambda2 = fgr.lambda2;
  r.gamma_fgr = fgr.gamma_fgr;

  const SpectralMeasure mu = spectral_measure(build_block(m), embed_bound(m));
  const WidthResult w = energy_width(mu, r.lambda2, opt);
  r.delta_e = w.delta_e;
  r.heisenberg_time = heisenberg_time(mu);
  if (w.zero_width || mu.size() == 1) {
    r.infinite = true;
    r.sojourn_lb = r.sojourn = std::numeric_limits<double>::infinity();
    r.bound_ok = true;
    return r;
  }
  r.sojourn_lb = 1.0 / r.delta_e;
  r.horizon = horizon_fraction * r.heisenberg_time;
  r.sojourn = sojourn_truncated(mu, r.horizon).value;
  r.bound_ok = r.sojourn >= (1.0 - rel_tol) * r.sojourn_lb;
  return r;
}

}  // namespace sojourn
