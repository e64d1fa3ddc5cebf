#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

#include "qexp/error.hpp"

namespace qexp {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

// Shared numerical tolerances.
inline constexpr double UNITARITY_TOL = 1e-10;
inline constexpr double EIG_TOL = 1e-10;
inline constexpr double WEIGHT_SUM_TOL = 1e-12;
inline constexpr double PAIRING_TOL = 1e-12;

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const RealMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const ComplexVector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// max |U^dagger U - 1| over entries.
inline double unitarity_residual(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return max_abs(ComplexMatrix(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())));
}

inline bool is_unitary(const ComplexMatrix& u, double tol = UNITARITY_TOL) {
  return unitarity_residual(u) <= tol;
}

/// Hilbert-Schmidt inner product tr(A^dagger B).
inline Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require(a.rows() == a.cols() && b.rows() == b.cols(), "hs_inner: matrices must be square");
  detail::require(a.rows() == b.rows(), "hs_inner: shape mismatch");
  // sum_ij conj(A_ij) B_ij
  return (a.conjugate().cwiseProduct(b)).sum();
}

/// Column-stacking vectorization: entry (r, c) lands at index r + c * rows.
inline ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index n) {
  detail::require(v.size() == n * n, "unvec: length is not n^2");
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

/// M(i, j): a single unit entry at row i, column j.
inline ComplexMatrix matrix_unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

}  // namespace qexp
