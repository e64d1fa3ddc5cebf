#pragma once

#include <Eigen/QR>

#include "qexp/matrix.hpp"
#include "qexp/rng.hpp"

namespace qexp {

inline ComplexMatrix complex_ginibre(Eigen::Index n, SeededRng& rng) {
  ComplexMatrix z(n, n);
  // Fill column-major so the sample order is independent of Eigen's storage choice.
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) z(r, c) = rng.complex_normal();
  return z;
}

/// Haar-distributed n x n unitary: QR of a complex Ginibre matrix with the
/// diagonal of R made positive (column j of Q multiplied by phase(R_jj)).
inline ComplexMatrix haar_unitary(Eigen::Index n, SeededRng& rng) {
  if (n < 1) throw ValidationError("haar_unitary: dimension must be >= 1");
  const ComplexMatrix z = complex_ginibre(n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const auto& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex rjj = packed(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) q.col(j) *= rjj / mag;
  }
  return q;
}

}  // namespace qexp
