#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "sojourn/linalg.hpp"

namespace sojourn {

/// Dense self-adjoint matrix with its eigendecomposition computed at construction.
/// Copies share the (immutable) data, so passing by value is cheap and thread safe.
class HermitianOperator {
 public:
  /// Throws InvalidArgument when the hermiticity defect exceeds 1e-12 * scale.
  /// The stored matrix is the exact Hermitian part (A + A^dagger)/2.
  explicit HermitianOperator(const Matrix& entries);
  explicit HermitianOperator(const RealMatrix& entries);
  static HermitianOperator diagonal(const RealVector& diag);

  Eigen::Index dim() const { return d_->entries.rows(); }
  const Matrix& matrix() const { return d_->entries; }
  bool is_real() const { return d_->eig.real; }
  /// max |entry|, the reference size for every relative tolerance
  double scale() const { return d_->scale; }
  const RealVector& eigenvalues() const { return d_->eig.values; }
  const linalg::EigenSystem& eig() const { return d_->eig; }
  /// max |E_k| over the spectrum
  double spectral_radius() const;

  Vector apply(const Vector& v) const { return d_->entries * v; }
  /// Coefficients U^dagger v in the eigenbasis.
  Vector project(const Vector& v) const { return d_->eig.to_eigenbasis(v); }
  Vector expand(const Vector& c) const { return d_->eig.from_eigenbasis(c); }

  /// ||A - U diag(E) U^dagger||_F
  double reconstruction_residual() const;
  /// ||U^dagger U - I||_F
  double orthonormality_residual() const;

 private:
  struct Data {
    Matrix entries;
    double scale = 0.0;
    linalg::EigenSystem eig;
  };
  explicit HermitianOperator(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  static std::shared_ptr<const Data> build(Matrix entries);
  std::shared_ptr<const Data> d_;
};

/// Unit vector (||vec|| = 1 within 1e-12).
class State {
 public:
  explicit State(Vector vec);
  static State normalize(const Vector& v);
  static State basis(Eigen::Index dim, Eigen::Index k);
  const Vector& vec() const { return vec_; }
  Eigen::Index dim() const { return vec_.size(); }

 private:
  Vector vec_;
};

struct SpectralPoint {
  double energy = 0.0;
  double weight = 0.0;
};

/// Point measure of a normalized state: energies strictly ascending, weights summing to one.
class SpectralMeasure {
 public:
  SpectralMeasure() = default;
  /// Sorts, merges energies closer than merge_tol (weights summed, energies weight averaged)
  /// and drops exactly-zero weights. Throws if a weight is negative or the total is off by > 1e-10.
  static SpectralMeasure from_points(std::vector<SpectralPoint> points, double merge_tol = 0.0);
  static SpectralMeasure point_mass(double energy);

  const std::vector<SpectralPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  double total_weight() const;
  double mean() const;
  /// Sum of weights of points within tol of e.
  double weight_at(double e, double tol) const;
  /// Smallest positive gap between consecutive energies (infinity for a single point).
  double min_gap() const;
  double min_energy() const { return points_.front().energy; }
  double max_energy() const { return points_.back().energy; }
  /// max |E - c| with c the midpoint of the support; the frequency scale of |a(t)|^2.
  double centered_radius() const;

 private:
  std::vector<SpectralPoint> points_;
};

/// Eigenvalues with arbitrary nonnegative weights, e.g. |<phi_k, v>|^2 for an unnormalized v.
struct WeightedSpectrum {
  RealVector energies;
  RealVector weights;

  /// sum_k w_k / (E_k - z). Throws SingularPoint if z sits on a weighted energy.
  cplx stieltjes(cplx z) const;
  double total() const { return weights.sum(); }
};

/// Weights |<phi, v>|^2 of any vector over the eigenbasis of H, no merging.
WeightedSpectrum spectral_weights(const HermitianOperator& H, const Vector& v);

/// Measure of psi w.r.t. H with degeneracy merge at 1e-9 * scale.
SpectralMeasure spectral_measure(const HermitianOperator& H, const State& psi);

/// sum_k w_k / (E_k - z), Im z != 0 required.
cplx resolvent_expectation(const SpectralMeasure& mu, cplx z);
/// <v, (H - z)^{-1} v> for any v; z may be real if it avoids the spectrum.
cplx resolvent_expectation(const HermitianOperator& H, const Vector& v, cplx z);

/// P^perp H P^perp on the orthogonal complement of a unit vector p, materialized on the
/// Householder basis of that complement and diagonalized once.
class ReducedOperator {
 public:
  ReducedOperator(const HermitianOperator& H, const State& p);

  /// Coordinates of P^perp v on the complement basis.
  Vector compress(const Vector& v) const;
  /// Coordinates of compressed vector back in the full space (lies in Ran P^perp).
  Vector lift(const Vector& c) const;

  const HermitianOperator& op() const { return reduced_; }
  WeightedSpectrum weights(const Vector& v) const;
  /// <v, (H^perp - z)^{-1} v>; throws SingularPoint when z is within 1e-12 * scale of an eigenvalue.
  cplx expectation(const Vector& v, cplx z) const;

 private:
  Vector u_;  // Householder vector, R = I - beta u u^dagger, R p = alpha e_1
  double beta_ = 0.0;
  double tol_ = 0.0;
  HermitianOperator reduced_;
};

/// One-shot form of ReducedOperator::expectation.
cplx reduced_resolvent_expectation(const HermitianOperator& H, const State& p_range,
                                   const Vector& v, cplx z);

/// ||(H - lambda) psi|| from a matrix-vector product.
double residual_norm(const HermitianOperator& H, const State& psi, double lambda);
/// (sum_k w_k (E_k - lambda)^2)^{1/2}
double residual_norm(const SpectralMeasure& mu, double lambda);

}  // namespace sojourn
