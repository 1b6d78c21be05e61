#include "sojourn/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sojourn/errors.hpp"

namespace sojourn {

// ---------------------------------------------------------------- HermitianOperator

std::shared_ptr<const HermitianOperator::Data> HermitianOperator::build(Matrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0)
    throw InvalidArgument("spectral_core: operator must be a non-empty square matrix");
  auto d = std::make_shared<Data>();
  d->scale = linalg::max_abs(entries);
  const double defect = linalg::hermiticity_defect(entries);
  if (defect > 1e-12 * d->scale) {
    std::ostringstream msg;
    msg << "spectral_core: matrix is not Hermitian (defect " << defect << ", scale " << d->scale
        << ")";
    throw InvalidArgument(msg.str());
  }
  if (defect > 0.0) entries = 0.5 * (entries + entries.adjoint()).eval();
  d->eig = linalg::eigh(entries);
  d->entries = std::move(entries);
  return d;
}

HermitianOperator::HermitianOperator(const Matrix& entries) : d_(build(entries)) {}

HermitianOperator::HermitianOperator(const RealMatrix& entries)
    : d_(build(entries.cast<cplx>())) {}

HermitianOperator HermitianOperator::diagonal(const RealVector& diag) {
  return HermitianOperator(Matrix(diag.cast<cplx>().asDiagonal()));
}

double HermitianOperator::spectral_radius() const {
  const RealVector& e = eigenvalues();
  return std::max(std::abs(e[0]), std::abs(e[e.size() - 1]));
}

double HermitianOperator::reconstruction_residual() const {
  const linalg::EigenSystem& es = d_->eig;
  const Matrix u = es.vectors();
  return (d_->entries - u * es.values.cast<cplx>().asDiagonal() * u.adjoint()).norm();
}

double HermitianOperator::orthonormality_residual() const {
  const Matrix u = d_->eig.vectors();
  return (u.adjoint() * u - Matrix::Identity(dim(), dim())).norm();
}

// ---------------------------------------------------------------- State

State::State(Vector vec) : vec_(std::move(vec)) {
  if (vec_.size() == 0) throw InvalidArgument("spectral_core: empty state vector");
  if (std::abs(vec_.norm() - 1.0) > 1e-12)
    throw InvalidArgument("spectral_core: state is not normalized (norm " +
                          std::to_string(vec_.norm()) + ")");
}

State State::normalize(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidArgument("spectral_core: cannot normalize a zero or non-finite vector");
  return State(v / n);
}

State State::basis(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) throw InvalidArgument("spectral_core: basis index out of range");
  Vector v = Vector::Zero(dim);
  v[k] = 1.0;
  return State(std::move(v));
}

// ---------------------------------------------------------------- SpectralMeasure

SpectralMeasure SpectralMeasure::from_points(std::vector<SpectralPoint> points, double merge_tol) {
  double total = 0.0;
  for (const auto& p : points) {
    if (!(p.weight >= 0.0) || !std::isfinite(p.energy))
      throw InvalidArgument("spectral_core: measure needs finite energies and nonnegative weights");
    total += p.weight;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw InvalidArgument("spectral_core: measure weights sum to " + std::to_string(total) +
                          ", expected 1");
  std::stable_sort(points.begin(), points.end(),
                   [](const SpectralPoint& a, const SpectralPoint& b) { return a.energy < b.energy; });

  SpectralMeasure mu;
  std::size_t i = 0;
  while (i < points.size()) {
    // cluster: consecutive energies linked by gaps <= merge_tol
    std::size_t j = i + 1;
    while (j < points.size() && points[j].energy - points[j - 1].energy <= merge_tol) ++j;
    double w = 0.0, we = 0.0, e_plain = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      w += points[k].weight;
      we += points[k].weight * points[k].energy;
      e_plain += points[k].energy;
    }
    if (w > 0.0) mu.points_.push_back({we / w, w});
    else if (j - i == points.size()) mu.points_.push_back({e_plain / double(j - i), 0.0});
    i = j;
  }
  if (mu.points_.empty()) throw InvalidArgument("spectral_core: measure has no support");
  return mu;
}

SpectralMeasure SpectralMeasure::point_mass(double energy) {
  return from_points({{energy, 1.0}});
}

double SpectralMeasure::total_weight() const {
  double s = 0.0;
  for (const auto& p : points_) s += p.weight;
  return s;
}

double SpectralMeasure::mean() const {
  double s = 0.0;
  for (const auto& p : points_) s += p.weight * p.energy;
  return s;
}

double SpectralMeasure::weight_at(double e, double tol) const {
  double s = 0.0;
  for (const auto& p : points_)
    if (std::abs(p.energy - e) <= tol) s += p.weight;
  return s;
}

double SpectralMeasure::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < points_.size(); ++k)
    g = std::min(g, points_[k].energy - points_[k - 1].energy);
  return g;
}

double SpectralMeasure::centered_radius() const {
  return 0.5 * (max_energy() - min_energy());
}

// ---------------------------------------------------------------- resolvents

cplx WeightedSpectrum::stieltjes(cplx z) const {
  cplx s = 0.0;
  for (Eigen::Index k = 0; k < energies.size(); ++k) {
    const cplx d = energies[k] - z;
    if (d == cplx(0.0)) {
      if (weights[k] == 0.0) continue;
      throw SingularPoint("spectral_core: z coincides with an eigenvalue", energies[k]);
    }
    s += weights[k] / d;
  }
  return s;
}

WeightedSpectrum spectral_weights(const HermitianOperator& H, const Vector& v) {
  if (v.size() != H.dim())
    throw InvalidArgument("spectral_core: vector length " + std::to_string(v.size()) +
                          " does not match operator dimension " + std::to_string(H.dim()));
  WeightedSpectrum ws;
  ws.energies = H.eigenvalues();
  ws.weights = H.project(v).cwiseAbs2();
  return ws;
}

SpectralMeasure spectral_measure(const HermitianOperator& H, const State& psi) {
  const WeightedSpectrum ws = spectral_weights(H, psi.vec());
  std::vector<SpectralPoint> pts(ws.energies.size());
  for (Eigen::Index k = 0; k < ws.energies.size(); ++k) pts[k] = {ws.energies[k], ws.weights[k]};
  return SpectralMeasure::from_points(std::move(pts), 1e-9 * H.scale());
}

cplx resolvent_expectation(const SpectralMeasure& mu, cplx z) {
  if (z.imag() == 0.0)
    throw InvalidArgument("spectral_core: resolvent_expectation needs Im z != 0");
  cplx s = 0.0;
  for (const auto& p : mu.points()) s += p.weight / (p.energy - z);
  return s;
}

cplx resolvent_expectation(const HermitianOperator& H, const Vector& v, cplx z) {
  return spectral_weights(H, v).stieltjes(z);
}

// ---------------------------------------------------------------- ReducedOperator

namespace {

struct Householder {
  Vector u;
  double beta;
};

// R = I - beta u u^dagger is Hermitian, unitary and maps p to alpha e_1 with |alpha| = 1,
// so columns 2..n of R are an orthonormal basis of p's complement.
Householder householder(const Vector& p) {
  const cplx p0 = p[0];
  const cplx alpha = std::abs(p0) > 0.0 ? -p0 / std::abs(p0) : cplx(-1.0);
  Householder h;
  h.u = p;
  h.u[0] -= alpha;
  h.beta = 2.0 / h.u.squaredNorm();
  return h;
}

Matrix complement_block(const HermitianOperator& H, const Householder& h) {
  const Matrix& A = H.matrix();
  const Vector w = A * h.u;
  const double uw = h.u.dot(w).real();
  Matrix m = A;
  m.noalias() -= h.beta * h.u * w.adjoint();
  m.noalias() -= h.beta * w * h.u.adjoint();
  m.noalias() += (h.beta * h.beta * uw) * h.u * h.u.adjoint();
  const Eigen::Index n = A.rows();
  Matrix block = m.bottomRightCorner(n - 1, n - 1);
  // Exact Hermitian part; the rank-two update leaves roundoff asymmetry.
  return 0.5 * (block + block.adjoint());
}

HermitianOperator reduced_from(const HermitianOperator& H, const State& p, Householder& h) {
  if (p.dim() != H.dim())
    throw InvalidArgument("spectral_core: projection vector does not match operator dimension");
  if (H.dim() < 2)
    throw InvalidArgument("spectral_core: orthogonal complement of a 1-dim space is empty");
  h = householder(p.vec());
  if (H.is_real() && (p.vec().array().imag() == 0.0).all())
    return HermitianOperator(RealMatrix(complement_block(H, h).real()));
  return HermitianOperator(complement_block(H, h));
}

}  // namespace

ReducedOperator::ReducedOperator(const HermitianOperator& H, const State& p)
    : reduced_([&] {
        Householder h;
        HermitianOperator r = reduced_from(H, p, h);
        u_ = std::move(h.u);
        beta_ = h.beta;
        return r;
      }()) {
  tol_ = 1e-12 * std::max(H.scale(), std::numeric_limits<double>::min());
}

Vector ReducedOperator::compress(const Vector& v) const {
  if (v.size() != u_.size())
    throw InvalidArgument("spectral_core: vector does not match operator dimension");
  const Vector rv = v - beta_ * u_ * u_.dot(v);
  return rv.tail(rv.size() - 1);
}

Vector ReducedOperator::lift(const Vector& c) const {
  Vector full(c.size() + 1);
  full[0] = 0.0;
  full.tail(c.size()) = c;
  return full - beta_ * u_ * u_.dot(full);
}

WeightedSpectrum ReducedOperator::weights(const Vector& v) const {
  return spectral_weights(reduced_, compress(v));
}

cplx ReducedOperator::expectation(const Vector& v, cplx z) const {
  const WeightedSpectrum ws = weights(v);
  for (Eigen::Index k = 0; k < ws.energies.size(); ++k)
    if (std::abs(ws.energies[k] - z) <= tol_ && ws.weights[k] > 0.0)
      throw SingularPoint("spectral_core: z lies on the spectrum of the reduced operator",
                          ws.energies[k]);
  return ws.stieltjes(z);
}

cplx reduced_resolvent_expectation(const HermitianOperator& H, const State& p_range,
                                   const Vector& v, cplx z) {
  return ReducedOperator(H, p_range).expectation(v, z);
}

double residual_norm(const HermitianOperator& H, const State& psi, double lambda) {
  if (psi.dim() != H.dim()) throw InvalidArgument("spectral_core: dimension mismatch");
  return (H.apply(psi.vec()) - lambda * psi.vec()).norm();
}

double residual_norm(const SpectralMeasure& mu, double lambda) {
  double s = 0.0;
  for (const auto& p : mu.points()) s += p.weight * (p.energy - lambda) * (p.energy - lambda);
  return std::sqrt(s);
}

}  // namespace sojourn
