#pragma once

#include <complex>

#include <Eigen/Dense>

namespace sojourn {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace linalg {

/// Eigenpairs of a dense Hermitian matrix, eigenvalues ascending.
/// Real symmetric input keeps real eigenvectors (half the storage, ~3x faster solve).
struct EigenSystem {
  RealVector values;
  RealMatrix real_vectors;  // filled when the input was real
  Matrix complex_vectors;   // filled otherwise
  bool real = false;

  Eigen::Index dim() const { return values.size(); }
  /// U^dagger v
  Vector to_eigenbasis(const Vector& v) const;
  /// U c
  Vector from_eigenbasis(const Vector& c) const;
  Matrix vectors() const;
};

/// Backed by LAPACK ?syevd / ?heevd. Diagonal input short-circuits to a sort.
EigenSystem eigh(const Matrix& hermitian);
EigenSystem eigh(const RealMatrix& symmetric);

bool is_real(const Matrix& m);
double max_abs(const Matrix& m);

/// max |m_ij - conj(m_ji)|
double hermiticity_defect(const Matrix& m);

/// exp(-i * dt * H) for Hermitian H through its eigendecomposition.
Matrix unitary_step(const Matrix& hermitian, double dt);

/// Nearest unitary in Frobenius norm (polar factor via SVD).
Matrix polar_unitary(const Matrix& m);

}  // namespace linalg
}  // namespace sojourn
