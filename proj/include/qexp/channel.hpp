#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qexp/haar.hpp"
#include "qexp/matrix.hpp"

namespace qexp {

// A unital CPTP map E(M) = sum_s P(s) U(s)^dagger M U(s), stored as unitaries
// plus weights. A hermitian channel pairs U(s + D/2) = U(s)^dagger with
// P(s + D/2) = P(s), which makes E self-adjoint under tr(A^dagger B).
class Channel {
 public:
  Eigen::Index dim() const { return dim_; }
  std::size_t kraus_count() const { return unitaries_.size(); }
  bool hermitian() const { return hermitian_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<ComplexMatrix>& unitaries() const { return unitaries_; }
  const ComplexMatrix& unitary(std::size_t s) const { return unitaries_.at(s); }
  double weight(std::size_t s) const { return weights_.at(s); }

  /// Seed the unitaries were sampled with, if any; carried into diagnostics.
  std::optional<std::uint64_t> seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  bool uniform_weights() const {
    const double w = 1.0 / static_cast<double>(weights_.size());
    return std::all_of(weights_.begin(), weights_.end(),
                       [w](double p) { return std::abs(p - w) <= WEIGHT_SUM_TOL; });
  }

  friend Channel build_weighted(std::vector<ComplexMatrix> unitaries, std::vector<double> weights,
                                bool hermitian);

 private:
  Channel() = default;

  Eigen::Index dim_ = 0;
  std::vector<double> weights_;
  std::vector<ComplexMatrix> unitaries_;
  bool hermitian_ = false;
  std::optional<std::uint64_t> seed_;
};

/// Validating constructor for every channel variant.
inline Channel build_weighted(std::vector<ComplexMatrix> unitaries, std::vector<double> weights,
                              bool hermitian) {
  using detail::require;
  const std::size_t d = unitaries.size();
  require(d >= 1, "channel: at least one Kraus factor required");
  require(weights.size() == d, "channel: weights and unitaries differ in length");
  if (hermitian) {
    require(d % 2 == 0 && d >= 4, "channel: hermitian channels need an even Kraus count D >= 4");
  } else {
    require(d >= 2, "channel: non-hermitian channels need D >= 2");
  }
  const Eigen::Index n = unitaries.front().rows();
  require(n >= 1, "channel: dimension must be >= 1");
  double sum = 0.0;
  for (std::size_t s = 0; s < d; ++s) {
    const auto& u = unitaries[s];
    require(u.rows() == n && u.cols() == n, "channel: unitary " + std::to_string(s + 1) + " has wrong shape");
    require(is_unitary(u), "channel: factor " + std::to_string(s + 1) + " is not unitary");
    require(std::isfinite(weights[s]) && weights[s] >= 0.0, "channel: weights must be nonnegative");
    sum += weights[s];
  }
  require(std::abs(sum - 1.0) <= WEIGHT_SUM_TOL, "channel: weights must sum to 1");
  if (hermitian) {
    const std::size_t half = d / 2;
    for (std::size_t s = 0; s < half; ++s) {
      const std::string which = std::to_string(s + 1) + " and " + std::to_string(s + half + 1);
      require(max_abs(ComplexMatrix(unitaries[s + half] - unitaries[s].adjoint())) <= PAIRING_TOL,
              "channel: hermitian pairing violated for unitaries " + which);
      require(std::abs(weights[s + half] - weights[s]) <= PAIRING_TOL,
              "channel: hermitian pairing violated for weights " + which);
    }
  }
  Channel c;
  c.dim_ = n;
  c.unitaries_ = std::move(unitaries);
  c.weights_ = std::move(weights);
  c.hermitian_ = hermitian;
  return c;
}

inline std::vector<double> uniform_weights(std::size_t d) {
  return std::vector<double>(d, 1.0 / static_cast<double>(d));
}

/// D/2 Haar unitaries followed by their adjoints, weights 1/D.
inline Channel build_hermitian_random(Eigen::Index n, std::size_t d, SeededRng& rng) {
  detail::require(n >= 2, "build_hermitian_random: N must be >= 2");
  detail::require(d % 2 == 0 && d >= 4, "build_hermitian_random: D must be even and >= 4");
  std::vector<ComplexMatrix> us;
  us.reserve(d);
  for (std::size_t s = 0; s < d / 2; ++s) us.push_back(haar_unitary(n, rng));
  for (std::size_t s = 0; s < d / 2; ++s) us.push_back(us[s].adjoint());
  Channel c = build_weighted(std::move(us), uniform_weights(d), true);
  c.set_seed(rng.master_seed());
  return c;
}

/// D independent Haar unitaries, weights 1/D.
inline Channel build_nonhermitian_random(Eigen::Index n, std::size_t d, SeededRng& rng) {
  detail::require(n >= 2, "build_nonhermitian_random: N must be >= 2");
  detail::require(d >= 2, "build_nonhermitian_random: D must be >= 2");
  std::vector<ComplexMatrix> us;
  us.reserve(d);
  for (std::size_t s = 0; s < d; ++s) us.push_back(haar_unitary(n, rng));
  Channel c = build_weighted(std::move(us), uniform_weights(d), false);
  c.set_seed(rng.master_seed());
  return c;
}

/// Hermitian channel with random pair weights P(s) = P(s + D/2).
inline Channel build_weighted_hermitian_random(Eigen::Index n, std::size_t d, SeededRng& rng) {
  detail::require(d % 2 == 0 && d >= 4, "build_weighted_hermitian_random: D must be even and >= 4");
  std::vector<ComplexMatrix> us;
  for (std::size_t s = 0; s < d / 2; ++s) us.push_back(haar_unitary(n, rng));
  for (std::size_t s = 0; s < d / 2; ++s) us.push_back(us[s].adjoint());
  std::vector<double> half(d / 2);
  for (auto& w : half) w = 0.05 + rng.uniform();
  const double total = 2.0 * std::accumulate(half.begin(), half.end(), 0.0);
  std::vector<double> weights(d);
  for (std::size_t s = 0; s < d / 2; ++s) weights[s] = weights[s + d / 2] = half[s] / total;
  // Push the rounding residue into one pair so the sum is 1 to the last bit we can manage.
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  weights[0] += (1.0 - sum) / 2.0;
  weights[d / 2] = weights[0];
  Channel c = build_weighted(std::move(us), std::move(weights), true);
  c.set_seed(rng.master_seed());
  return c;
}

/// E(M) = M, as a hermitian channel with four identity factors.
inline Channel identity_channel(Eigen::Index n) {
  std::vector<ComplexMatrix> us(4, ComplexMatrix::Identity(n, n));
  return build_weighted(std::move(us), uniform_weights(4), true);
}

/// sum_s P(s) U(s)^dagger M U(s)
inline ComplexMatrix apply(const Channel& channel, const ComplexMatrix& m) {
  detail::require(m.rows() == channel.dim() && m.cols() == channel.dim(), "apply: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  ComplexMatrix tmp(m.rows(), m.cols());
  for (std::size_t s = 0; s < channel.kraus_count(); ++s) {
    const double p = channel.weight(s);
    if (p == 0.0) continue;
    const ComplexMatrix& u = channel.unitary(s);
    tmp.noalias() = m * u;
    out.noalias() += p * (u.adjoint() * tmp);
  }
  return out;
}

/// E applied twice, as a channel with Kraus factors U(s)U(t) and weights P(s)P(t).
/// Hermitian pairing is preserved: (s, t) is paired with (t + D/2, s + D/2), and
/// the identity products (s, s + D/2) are paired with (s + D/2, s).
inline Channel square(const Channel& channel) {
  const std::size_t d = channel.kraus_count();
  if (!channel.hermitian()) {
    std::vector<ComplexMatrix> us;
    std::vector<double> ws;
    for (std::size_t s = 0; s < d; ++s)
      for (std::size_t t = 0; t < d; ++t) {
        us.push_back(channel.unitary(s) * channel.unitary(t));
        ws.push_back(channel.weight(s) * channel.weight(t));
      }
    return build_weighted(std::move(us), std::move(ws), false);
  }
  const std::size_t half = d / 2;
  auto bar = [&](std::size_t s) { return (s + half) % d; };
  std::vector<std::pair<std::size_t, std::size_t>> first, second;
  std::vector<std::vector<bool>> used(d, std::vector<bool>(d, false));
  for (std::size_t s = 0; s < d; ++s)
    for (std::size_t t = 0; t < d; ++t) {
      if (used[s][t]) continue;
      std::pair<std::size_t, std::size_t> partner{bar(t), bar(s)};
      if (partner == std::pair{s, t}) partner = {t, s};  // (s, s+D/2) -> (s+D/2, s)
      used[s][t] = used[partner.first][partner.second] = true;
      first.emplace_back(s, t);
      second.push_back(partner);
    }
  std::vector<ComplexMatrix> us;
  std::vector<double> ws;
  for (const auto& group : {first, second})
    for (auto [s, t] : group) {
      us.push_back(channel.unitary(s) * channel.unitary(t));
      ws.push_back(channel.weight(s) * channel.weight(t));
    }
  // Products of adjoint pairs are exact adjoints only up to rounding; snap the
  // second half onto the adjoints of the first so the pairing check is exact.
  for (std::size_t k = 0; k < first.size(); ++k) {
    us[k + first.size()] = us[k].adjoint();
    ws[k + first.size()] = ws[k];
  }
  return build_weighted(std::move(us), std::move(ws), true);
}

}  // namespace qexp
