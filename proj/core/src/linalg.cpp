#include "sojourn/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include <lapacke.h>

#include "sojourn/errors.hpp"

namespace sojourn::linalg {

namespace {

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != cplx(0.0)) return false;
  return true;
}

// Sorting the diagonal is exact; no reason to pay for a dense solve.
EigenSystem diagonal_system(const RealVector& diag) {
  const Eigen::Index n = diag.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return diag[a] < diag[b]; });
  EigenSystem es;
  es.real = true;
  es.values.resize(n);
  es.real_vectors = RealMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    es.values[k] = diag[order[k]];
    es.real_vectors(order[k], k) = 1.0;
  }
  return es;
}

EigenSystem real_solve(RealMatrix a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EigenSystem es;
  es.real = true;
  es.values.resize(n);
  if (n == 0) return es;
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, es.values.data());
  if (info != 0)
    throw NumericalFailure("spectral_core: dsyevd failed, info = " + std::to_string(info));
  es.real_vectors = std::move(a);
  return es;
}

}  // namespace

Vector EigenSystem::to_eigenbasis(const Vector& v) const {
  if (real) return real_vectors.transpose() * v;
  return complex_vectors.adjoint() * v;
}

Vector EigenSystem::from_eigenbasis(const Vector& c) const {
  if (real) return real_vectors * c;
  return complex_vectors * c;
}

Matrix EigenSystem::vectors() const {
  if (real) return real_vectors.cast<cplx>();
  return complex_vectors;
}

bool is_real(const Matrix& m) {
  return (m.array().imag() == 0.0).all();
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

EigenSystem eigh(const RealMatrix& symmetric) {
  if (symmetric.rows() != symmetric.cols())
    throw InvalidArgument("spectral_core: eigh needs a square matrix");
  bool diag = true;
  for (Eigen::Index j = 0; j < symmetric.cols() && diag; ++j)
    for (Eigen::Index i = 0; i < symmetric.rows(); ++i)
      if (i != j && symmetric(i, j) != 0.0) {
        diag = false;
        break;
      }
  if (diag) return diagonal_system(symmetric.diagonal());
  return real_solve(symmetric);
}

EigenSystem eigh(const Matrix& hermitian) {
  if (hermitian.rows() != hermitian.cols())
    throw InvalidArgument("spectral_core: eigh needs a square matrix");
  if (is_diagonal(hermitian)) return diagonal_system(hermitian.diagonal().real());
  if (is_real(hermitian)) return real_solve(hermitian.real());

  const lapack_int n = static_cast<lapack_int>(hermitian.rows());
  Matrix a = hermitian;
  EigenSystem es;
  es.values.resize(n);
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                   reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                   es.values.data());
  if (info != 0)
    throw NumericalFailure("spectral_core: zheevd failed, info = " + std::to_string(info));
  es.complex_vectors = std::move(a);
  return es;
}

Matrix unitary_step(const Matrix& hermitian, double dt) {
  const EigenSystem es = eigh(hermitian);
  Vector phase(es.dim());
  for (Eigen::Index k = 0; k < es.dim(); ++k) phase[k] = std::polar(1.0, -dt * es.values[k]);
  if (es.real) {
    const Matrix u = es.real_vectors.cast<cplx>();
    return u * phase.asDiagonal() * es.real_vectors.transpose().cast<cplx>();
  }
  return es.complex_vectors * phase.asDiagonal() * es.complex_vectors.adjoint();
}

Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace sojourn::linalg
