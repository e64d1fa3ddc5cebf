#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "qexp/channel.hpp"
#include "qexp/lapack.hpp"
#include "qexp/matrix.hpp"

namespace qexp {

inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

//----------------------------------------------------------------------------
// Superoperator
//----------------------------------------------------------------------------

/// Matrix of E on column-stacked vec(M): sum_s P(s) (U(s)^T kron U(s)^dagger).
inline ComplexMatrix superoperator(const Channel& channel) {
  const Eigen::Index n = channel.dim();
  ComplexMatrix s = ComplexMatrix::Zero(n * n, n * n);
  for (std::size_t k = 0; k < channel.kraus_count(); ++k) {
    const double p = channel.weight(k);
    if (p == 0.0) continue;
    const ComplexMatrix& u = channel.unitary(k);
    const ComplexMatrix ud = u.adjoint();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) s.block(i * n, j * n, n, n) += (p * u(j, i)) * ud;
  }
  return s;
}

// Orthonormal basis of N x N Hermitian matrices (under tr(A^dagger B)), each
// element a short list of nonzero entries. Element 0 is 1/sqrt(N); elements
// 1..N-1 are traceless diagonals; then (E_ij + E_ji)/sqrt2 and
// i(E_ji - E_ij)/sqrt2 for i < j.
struct BasisEntry {
  Eigen::Index row;
  Eigen::Index col;
  Complex coeff;
};
using HermitianBasis = std::vector<std::vector<BasisEntry>>;

inline HermitianBasis hermitian_basis(Eigen::Index n) {
  HermitianBasis basis;
  basis.reserve(n * n);
  {
    std::vector<BasisEntry> id;
    for (Eigen::Index i = 0; i < n; ++i) id.push_back({i, i, 1.0 / std::sqrt(double(n))});
    basis.push_back(std::move(id));
  }
  for (Eigen::Index k = 1; k < n; ++k) {
    const double norm = 1.0 / std::sqrt(double(k) * double(k + 1));
    std::vector<BasisEntry> diag;
    for (Eigen::Index i = 0; i < k; ++i) diag.push_back({i, i, norm});
    diag.push_back({k, k, -double(k) * norm});
    basis.push_back(std::move(diag));
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      basis.push_back({{i, j, r}, {j, i, r}});
      basis.push_back({{i, j, Complex(0, -r)}, {j, i, Complex(0, r)}});
    }
  return basis;
}

/// Hermitian matrix sum_b coeffs(b) B_b.
inline ComplexMatrix from_hermitian_basis(Eigen::Index n, const Eigen::VectorXd& coeffs) {
  detail::require(coeffs.size() == n * n, "from_hermitian_basis: coefficient count != N^2");
  const HermitianBasis basis = hermitian_basis(n);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Eigen::Index b = 0; b < n * n; ++b)
    for (const auto& e : basis[b]) m(e.row, e.col) += coeffs(b) * e.coeff;
  return m;
}

/// E written in the Hermitian basis. Every CP map sends Hermitian matrices to
/// Hermitian matrices, so this is a real N^2 x N^2 matrix unitarily similar to
/// superoperator(); it is symmetric when the channel is hermitian.
inline RealMatrix hermitian_basis_superoperator(const Channel& channel) {
  const Eigen::Index n = channel.dim();
  const Eigen::Index n2 = n * n;
  const HermitianBasis basis = hermitian_basis(n);
  ComplexMatrix w(n2, n2);
  {
    const ComplexMatrix s = superoperator(channel);
    for (Eigen::Index c = 0; c < n2; ++c) {
      auto col = w.col(c);
      col.setZero();
      for (const auto& e : basis[c]) col += e.coeff * s.col(e.row + e.col * n);
    }
  }
  RealMatrix r = RealMatrix::Zero(n2, n2);
  for (Eigen::Index b = 0; b < n2; ++b)
    for (const auto& e : basis[b]) r.row(b) += (std::conj(e.coeff) * w.row(e.row + e.col * n)).real();
  if (channel.hermitian()) r = (0.5 * (r + r.transpose())).eval();
  return r;
}

//----------------------------------------------------------------------------
// Spectrum
//----------------------------------------------------------------------------

struct SecondEigenvalue {
  double modulus = 0.0;          // lambda2
  std::size_t removed_index = 0; // the eigenvalue treated as the unit eigenvalue
  std::size_t index = 0;         // where lambda2 was found
};

/// Remove the one eigenvalue closest to 1 (ties: largest real part, then
/// lowest index) and return the largest modulus among the rest.
inline SecondEigenvalue second_eigenvalue(const std::vector<Complex>& eigenvalues) {
  detail::require(eigenvalues.size() >= 2, "second_eigenvalue: need at least two eigenvalues");
  std::size_t removed = 0;
  double best = INFINITY;
  for (std::size_t a = 0; a < eigenvalues.size(); ++a) best = std::min(best, std::abs(eigenvalues[a] - 1.0));
  double best_re = -INFINITY;
  for (std::size_t a = 0; a < eigenvalues.size(); ++a) {
    if (std::abs(eigenvalues[a] - 1.0) <= best + EIG_TOL && eigenvalues[a].real() > best_re) {
      best_re = eigenvalues[a].real();
      removed = a;
    }
  }
  SecondEigenvalue out;
  out.removed_index = removed;
  out.modulus = -1.0;
  for (std::size_t a = 0; a < eigenvalues.size(); ++a) {
    if (a == removed) continue;
    if (std::abs(eigenvalues[a]) > out.modulus) {
      out.modulus = std::abs(eigenvalues[a]);
      out.index = a;
    }
  }
  return out;
}

struct SuperopSpectrum {
  Eigen::Index dim = 0;
  std::vector<Complex> eigenvalues;  // hermitian: descending real part; otherwise descending modulus
  bool hermitian = false;
  double lambda2 = 0.0;
  std::size_t removed_index = 0;
  std::size_t lambda2_index = 0;
  double unit_eigvec_residual = 0.0;
};

struct SpectrumOptions {
  Eigen::Index max_side = 4096;  // N^2 ceiling, i.e. N <= 64
};

/// max |E(1/sqrt N) - 1/sqrt N|
inline double unit_eigenvector_residual(const Channel& channel) {
  const Eigen::Index n = channel.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  return max_abs(ComplexMatrix(apply(channel, id) - id)) / std::sqrt(double(n));
}

namespace detail {

inline void check_side(const Channel& channel, const SpectrumOptions& options) {
  require(channel.dim() * channel.dim() <= options.max_side,
          "spectrum: N^2 = " + std::to_string(channel.dim() * channel.dim()) + " exceeds the configured ceiling " +
              std::to_string(options.max_side));
}

inline std::string seed_note(const Channel& channel) {
  return channel.seed() ? " (channel seed " + std::to_string(*channel.seed()) + ")" : " (unseeded channel)";
}

}  // namespace detail

inline SuperopSpectrum eigen_spectrum(const Channel& channel, const SpectrumOptions& options = {}) {
  detail::check_side(channel, options);
  SuperopSpectrum out;
  out.dim = channel.dim();
  out.hermitian = channel.hermitian();
  try {
    RealMatrix r = hermitian_basis_superoperator(channel);
    if (channel.hermitian()) {
      const auto eig = lapack::symmetric_eigen(std::move(r), false);
      out.eigenvalues.reserve(eig.values.size());
      for (Eigen::Index a = eig.values.size() - 1; a >= 0; --a) out.eigenvalues.emplace_back(eig.values(a), 0.0);
    } else {
      out.eigenvalues = lapack::general_eigenvalues(std::move(r));
      std::stable_sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](Complex a, Complex b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
      });
    }
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + detail::seed_note(channel));
  }
  const auto second = second_eigenvalue(out.eigenvalues);
  out.lambda2 = second.modulus;
  out.removed_index = second.removed_index;
  out.lambda2_index = second.index;
  out.unit_eigvec_residual = unit_eigenvector_residual(channel);
  return out;
}

/// Full eigendecomposition of a hermitian channel in the Hermitian basis.
struct HermitianDecomposition {
  Eigen::VectorXd values;  // descending
  RealMatrix vectors;      // column a pairs with values(a); coefficients in hermitian_basis()
};

inline HermitianDecomposition hermitian_decomposition(const Channel& channel, const SpectrumOptions& options = {}) {
  detail::require(channel.hermitian(), "hermitian_decomposition: channel is not hermitian");
  detail::check_side(channel, options);
  try {
    auto eig = lapack::symmetric_eigen(hermitian_basis_superoperator(channel), true);
    HermitianDecomposition out;
    out.values = eig.values.reverse();
    out.vectors = eig.vectors.rowwise().reverse();
    return out;
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + detail::seed_note(channel));
  }
}

//----------------------------------------------------------------------------
// Moments
//----------------------------------------------------------------------------

/// sum_a lambda_a^m = tr(S^m) for a hermitian channel and even m, computed as
/// ||S^(m/2)||_F^2 with dense products.
inline double moment_trace(const Channel& channel, int m) {
  detail::require(channel.hermitian(), "moment_trace: channel must be hermitian");
  detail::require(m >= 2 && m % 2 == 0, "moment_trace: m must be even and >= 2");
  const RealMatrix r = hermitian_basis_superoperator(channel);
  RealMatrix power = r;
  for (int k = 1; k < m / 2; ++k) power = power * r;
  return power.squaredNorm();
}

struct MomentEstimate {
  double value = 0.0;
  bool saturated = false;  // value >= 1: the moment carries no gap information
};

/// (tr(S^m) - 1)^(1/m); never smaller than lambda2 for hermitian channels.
inline MomentEstimate estimate_lambda2_from_moments(const Channel& channel, int m) {
  const double t = moment_trace(channel, m);
  if (!(t > 1.0)) throw NumericalError("estimate_lambda2_from_moments: moment " + format_double(t) + " <= 1");
  MomentEstimate out;
  out.value = std::pow(t - 1.0, 1.0 / m);
  out.saturated = out.value >= 1.0;
  return out;
}

/// sum_ij (E^k(M(i,j)), E^k(M(i,j))) = ||S^k||_F^2 for k = 1..m_max.
inline std::vector<double> frobenius_moments(const Channel& channel, int m_max) {
  detail::require(m_max >= 1, "frobenius_moment: m must be >= 1");
  const RealMatrix r = hermitian_basis_superoperator(channel);
  std::vector<double> out;
  RealMatrix power = r;
  out.push_back(power.squaredNorm());
  for (int k = 2; k <= m_max; ++k) {
    power = power * r;
    out.push_back(power.squaredNorm());
  }
  return out;
}

inline double frobenius_moment(const Channel& channel, int m) { return frobenius_moments(channel, m).back(); }

//----------------------------------------------------------------------------
// Benchmarks
//----------------------------------------------------------------------------

struct BenchmarkConstants {
  int D = 0;
  double lambda_H = 0.0;      // 2 sqrt(D-1) / D
  double lambda_nH = 0.0;     // 1 / sqrt(D)
  double lambda_loose = 0.0;  // sqrt(lambda_H)
};

inline BenchmarkConstants benchmark_values(int d) {
  detail::require(d >= 2, "benchmark_values: D must be >= 2");
  BenchmarkConstants b;
  b.D = d;
  b.lambda_H = 2.0 * std::sqrt(double(d - 1)) / d;
  b.lambda_nH = 1.0 / std::sqrt(double(d));
  b.lambda_loose = std::sqrt(b.lambda_H);
  return b;
}

//----------------------------------------------------------------------------
// Export
//----------------------------------------------------------------------------

inline void write_spectrum_csv(std::ostream& os, const SuperopSpectrum& spectrum) {
  const double n2 = double(spectrum.dim) * double(spectrum.dim);
  os << "rank,a_over_N2,eig_re,eig_im,eig_abs\n";
  for (std::size_t a = 0; a < spectrum.eigenvalues.size(); ++a) {
    const Complex z = spectrum.eigenvalues[a];
    os << (a + 1) << ',' << format_double(double(a + 1) / n2) << ',' << format_double(z.real()) << ','
       << format_double(z.imag()) << ',' << format_double(std::abs(z)) << '\n';
  }
}

}  // namespace qexp
