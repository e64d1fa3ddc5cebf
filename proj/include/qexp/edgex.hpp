#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

#include "qexp/channel.hpp"
#include "qexp/error.hpp"
#include "qexp/haar.hpp"
#include "qexp/matrix.hpp"
#include "qexp/rng.hpp"
#include "qexp/spectrum.hpp"

namespace qexp {

inline constexpr double PROJECTOR_TOL = 1e-10;
inline constexpr double CHAIN_TOL = 1e-8;

// Orthogonal projector of rank l.
struct Projector {
  ComplexMatrix matrix;
  Eigen::Index rank = 0;

  Eigen::Index dim() const { return matrix.rows(); }
};

/// Validates P^2 = P, P = P^dagger and integer trace.
inline Projector make_projector(ComplexMatrix p) {
  detail::require(p.rows() == p.cols() && p.rows() >= 1, "projector: matrix must be square and nonempty");
  detail::require(max_abs(ComplexMatrix(p * p - p)) <= PROJECTOR_TOL, "projector: P^2 != P");
  detail::require(max_abs(ComplexMatrix(p - p.adjoint())) <= PROJECTOR_TOL, "projector: P is not hermitian");
  const double tr = p.trace().real();
  const double l = std::round(tr);
  detail::require(std::abs(tr - l) <= 1e-8, "projector: trace is not an integer");
  return {std::move(p), static_cast<Eigen::Index>(l)};
}

/// Projector onto the span of the given orthonormal columns.
inline Projector projector_onto(const ComplexMatrix& columns) {
  return {columns * columns.adjoint(), columns.cols()};
}

/// First l columns of a Haar unitary.
inline Projector random_projector(Eigen::Index n, Eigen::Index l, SeededRng& rng) {
  detail::require(l >= 1 && l <= n, "random_projector: rank must be in 1..N");
  const ComplexMatrix u = haar_unitary(n, rng);
  return projector_onto(u.leftCols(l));
}

/// tr(P E(P)) / tr(P).
inline double edge_ratio(const Channel& channel, const Projector& p) {
  detail::require(p.rank >= 1, "edge_ratio: projector has rank 0");
  detail::require(p.dim() == channel.dim(), "edge_ratio: projector and channel dimensions differ");
  return (p.matrix * apply(channel, p.matrix)).trace().real() / double(p.rank);
}

struct ConverseResult {
  bool holds = false;
  double lhs = 0.0;  // tr(P E(P))
  double rhs = 0.0;  // |lambda2| (l - l^2/N) + l^2/N
  double slack = 0.0;
};

/// tr(P E(P)) <= |lambda2| (l - l^2/N) + l^2/N for l <= N/2.
inline ConverseResult converse_check(const Channel& channel, const Projector& p, double lambda2) {
  detail::require(channel.hermitian(), "converse_check: channel must be hermitian");
  detail::require(p.dim() == channel.dim(), "converse_check: projector and channel dimensions differ");
  detail::require(2 * p.rank <= channel.dim(), "converse_check: projector rank exceeds N/2");
  const double l = double(p.rank);
  const double n = double(channel.dim());
  ConverseResult out;
  out.lhs = (p.matrix * apply(channel, p.matrix)).trace().real();
  out.rhs = std::abs(lambda2) * (l - l * l / n) + l * l / n;
  out.slack = out.rhs - out.lhs;
  out.holds = out.slack >= -CHAIN_TOL;
  return out;
}

inline ConverseResult converse_check(const Channel& channel, const Projector& p) {
  return converse_check(channel, p, eigen_spectrum(channel).lambda2);
}

struct ChainReport {
  double lambda2 = 0.0;           // largest eigenvalue after removing the unit one (signed)
  std::vector<double> f_values;   // f_1 >= ... >= f_m > 0, sum of squares 1
  std::vector<double> ratios;     // tr((1 - P_i) E(P_i)), i = 1..m
  double lhs = 0.0;
  double rhs = 0.0;               // sqrt(2 (1 - lambda2))
  bool holds = false;
  double trace_residual = 0.0;    // |tr X| for the normalized eigenvector X
  bool negated = false;           // -X was used so that m <= N/2
};

/// Edge-expansion chain for a hermitian channel: with X the lambda2
/// eigenvector, f the normalized positive part of its spectrum and P_i the
/// projector onto its top-i eigenvectors,
///   sum_{i<=m} (f_i^2 - f_{i+1}^2) tr((1 - P_i) E(P_i)) <= sqrt(2 (1 - lambda2)),
/// with f_{m+1} = 0.
inline ChainReport tanner_chain_check(const Channel& channel) {
  detail::require(channel.hermitian(), "tanner_chain_check: channel must be hermitian");
  const Eigen::Index n = channel.dim();
  const auto dec = hermitian_decomposition(channel);
  std::vector<Complex> values(dec.values.data(), dec.values.data() + dec.values.size());
  const SecondEigenvalue second = second_eigenvalue(values);
  // Values are descending, so the first surviving index carries the largest signed eigenvalue.
  const Eigen::Index top = second.removed_index == 0 ? 1 : 0;
  ChainReport out;
  out.lambda2 = dec.values(top);
  if (!(out.lambda2 > EIG_TOL))
    throw ValidationError("tanner_chain_check: second eigenvalue " + format_double(out.lambda2) +
                          " is not positive; check square(channel) instead");

  // Within a degenerate eigenspace pick the vector least aligned with the identity.
  // When the eigenvalue is 1 the identity itself lies in that space, so every
  // vector of it is a candidate and the identity component is removed afterwards.
  const bool unit = std::abs(out.lambda2 - 1.0) <= EIG_TOL;
  Eigen::Index pick = top;
  for (Eigen::Index a = 0; a < dec.values.size(); ++a) {
    if (!unit && a == static_cast<Eigen::Index>(second.removed_index)) continue;
    if (std::abs(dec.values(a) - out.lambda2) > EIG_TOL) continue;
    if (std::abs(dec.vectors(0, a)) < std::abs(dec.vectors(0, pick))) pick = a;
  }
  Eigen::VectorXd coeffs = dec.vectors.col(pick);
  if (unit) {
    coeffs(0) = 0.0;
    detail::require(coeffs.norm() > EIG_TOL, "tanner_chain_check: degenerate eigenspace has no traceless vector");
  }
  coeffs.normalize();
  ComplexMatrix x = from_hermitian_basis(n, coeffs);
  x = (0.5 * (x + x.adjoint())).eval();
  out.trace_residual = std::abs(x.trace());

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(x);
  if (es.info() != Eigen::Success) throw NumericalError("tanner_chain_check: eigensolver failed on X");
  // Ascending order from the solver; flip to descending.
  Eigen::VectorXd e = es.eigenvalues().reverse();
  ComplexMatrix v = es.eigenvectors().rowwise().reverse();
  auto positive = [&e] {
    Eigen::Index m = 0;
    while (m < e.size() && e(m) > 0.0) ++m;
    return m;
  };
  Eigen::Index m = positive();
  if (2 * m > n) {
    e = (-e).reverse().eval();
    v = v.rowwise().reverse().eval();
    out.negated = true;
    m = positive();
  }

  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) norm2 += e(i) * e(i);
  const double scale = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
  for (Eigen::Index i = 0; i < m; ++i) out.f_values.push_back(e(i) * scale);

  // P_ab = tr(M(a,a) E(M(b,b))) in the eigenbasis of X.
  RealMatrix pab = RealMatrix::Zero(n, n);
  for (std::size_t s = 0; s < channel.kraus_count(); ++s) {
    const ComplexMatrix w = v.adjoint() * channel.unitary(s).adjoint() * v;
    pab += channel.weight(s) * w.cwiseAbs2();
  }
  // tr((1 - P_i) E(P_i)) = sum_{a > i, b <= i} P_ab
  for (Eigen::Index i = 1; i <= m; ++i)
    out.ratios.push_back(pab.bottomLeftCorner(n - i, i).sum());
  for (Eigen::Index i = 0; i < m; ++i) {
    const double next = i + 1 < m ? out.f_values[i + 1] : 0.0;
    out.lhs += (out.f_values[i] * out.f_values[i] - next * next) * out.ratios[i];
  }
  out.rhs = std::sqrt(std::max(0.0, 2.0 * (1.0 - out.lambda2)));
  out.holds = out.lhs <= out.rhs + CHAIN_TOL;
  return out;
}

}  // namespace qexp
