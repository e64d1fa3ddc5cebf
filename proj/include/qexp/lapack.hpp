#pragma once

#include <complex>
#include <string>
#include <vector>

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include "qexp/matrix.hpp"

namespace qexp::lapack {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  RealMatrix vectors;       // columns; empty unless requested
};

/// Dense symmetric eigensolver (dsyevd). Only the lower triangle is read.
inline SymmetricEigen symmetric_eigen(RealMatrix a, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  detail::require(a.rows() == a.cols(), "symmetric_eigen: matrix must be square");
  SymmetricEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n, a.data(), n,
                                         out.values.data());
  if (info != 0) throw NumericalError("dsyevd failed to converge (info=" + std::to_string(info) + ")");
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

/// Eigenvalues of a general real matrix (dgeev, no vectors).
inline std::vector<std::complex<double>> general_eigenvalues(RealMatrix a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  detail::require(a.rows() == a.cols(), "general_eigenvalues: matrix must be square");
  std::vector<double> wr(n), wi(n);
  std::vector<std::complex<double>> out;
  if (n == 0) return out;
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("dgeev failed to converge (info=" + std::to_string(info) + ")");
  out.reserve(n);
  for (lapack_int i = 0; i < n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

}  // namespace qexp::lapack
