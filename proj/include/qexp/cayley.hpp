#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "qexp/error.hpp"

namespace qexp::cayley {

using BigInt = boost::multiprecision::cpp_int;

// Letters are 1..D; letter s and s + D/2 (mod D, in 1..D) are mutual inverses.
struct LetterSeq {
  int D = 0;
  std::vector<int> letters;

  friend bool operator==(const LetterSeq&, const LetterSeq&) = default;
};

inline int inverse_letter(int s, int d) { return (s - 1 + d / 2) % d + 1; }

/// Free reduction: delete adjacent inverse pairs until none remain.
inline LetterSeq reduce_word(const LetterSeq& seq) {
  detail::require(seq.D >= 4 && seq.D % 2 == 0, "reduce_word: D must be even and >= 4");
  LetterSeq out{seq.D, {}};
  out.letters.reserve(seq.letters.size());
  for (int s : seq.letters) {
    detail::require(s >= 1 && s <= seq.D, "reduce_word: letter " + std::to_string(s) + " out of range 1..D");
    if (!out.letters.empty() && out.letters.back() == inverse_letter(s, seq.D))
      out.letters.pop_back();
    else
      out.letters.push_back(s);
  }
  return out;
}

/// Largest o dividing len(seq) such that a cyclic shift by len/o fixes seq.
inline int shift_symmetry_period(const LetterSeq& seq) {
  const std::size_t len = seq.letters.size();
  detail::require(len > 0, "shift_symmetry_period: empty sequence");
  for (std::size_t shift = 1; shift <= len; ++shift) {
    if (len % shift != 0) continue;
    bool fixed = true;
    for (std::size_t i = 0; i < len && fixed; ++i) fixed = seq.letters[i] == seq.letters[(i + shift) % len];
    if (fixed) return static_cast<int>(len / shift);
  }
  return 1;
}

// N(l, m): number of length-m letter sequences whose free reduction has length l,
// i.e. walks on the tree with D children at the root and D-1 elsewhere.
class WalkTable {
 public:
  WalkTable(int d, int m_max) : d_(d), m_max_(m_max) {
    detail::require(d >= 2, "walk_counts: D must be >= 2");
    detail::require(m_max >= 0 && m_max <= 64, "walk_counts: m_max must lie in 0..64");
    counts_.assign(m_max + 1, std::vector<BigInt>(m_max + 1, 0));
    counts_[0][0] = 1;
    for (int m = 0; m < m_max; ++m)
      for (int l = 0; l <= m + 1; ++l) {
        BigInt v = 0;
        if (l >= 1) v += counts_[m][l - 1] * (l - 1 > 0 ? d - 1 : d);
        if (l + 1 <= m) v += counts_[m][l + 1];
        counts_[m + 1][l] = v;
      }
  }

  int D() const { return d_; }
  int m_max() const { return m_max_; }

  const BigInt& count(int l, int m) const {
    static const BigInt zero = 0;
    if (m < 0 || m > m_max_ || l < 0 || l > m) return zero;
    return counts_[m][l];
  }

  /// N(0, m) / D^m as a double; the tree return probability.
  double return_probability(int m) const {
    using boost::multiprecision::cpp_rational;
    const BigInt denom = boost::multiprecision::pow(BigInt(d_), m);
    return static_cast<double>(cpp_rational(count(0, m), denom));
  }

 private:
  int d_;
  int m_max_;
  std::vector<std::vector<BigInt>> counts_;  // [m][l]
};

inline WalkTable walk_counts(int d, int m_max) { return WalkTable(d, m_max); }

/// `D,m,l,count` rows for every nonzero entry.
inline void write_walk_csv(std::ostream& os, const WalkTable& table) {
  os << "D,m,l,count\n";
  for (int m = 0; m <= table.m_max(); ++m)
    for (int l = m % 2; l <= m; l += 2) os << table.D() << ',' << m << ',' << l << ',' << table.count(l, m) << '\n';
}

/// Return probabilities r(m), m = 0..m_max, of the walk on the free group
/// whose step s has probability P(s), with P(s) = P(s + D/2). Computed from the
/// first-return generating functions
///   G_t = P(t) P(t^-1) z^2 / (1 - sum_{u != t^-1} G_u),  R = 1 / (1 - sum_t G_t).
inline std::vector<double> weighted_return_probabilities(std::span<const double> weights, int m_max) {
  const int d = static_cast<int>(weights.size());
  detail::require(d >= 4 && d % 2 == 0, "weighted return probability: D must be even and >= 4");
  detail::require(m_max >= 0, "weighted return probability: m_max must be >= 0");
  const int len = m_max + 1;
  using Series = std::vector<double>;
  auto inverse_one_minus = [len](const Series& f) {  // 1 / (1 - f), f(0) = 0
    Series g(len, 0.0);
    g[0] = 1.0;
    for (int k = 1; k < len; ++k) {
      double acc = 0.0;
      for (int j = 1; j <= k; ++j) acc += f[j] * g[k - j];
      g[k] = acc;
    }
    return g;
  };
  std::vector<Series> g(d, Series(len, 0.0));
  // Each pass fixes two more coefficients.
  for (int pass = 0; pass <= m_max / 2 + 1; ++pass) {
    std::vector<Series> next(d, Series(len, 0.0));
    for (int t = 0; t < d; ++t) {
      const int tinv = (t + d / 2) % d;
      Series f(len, 0.0);
      for (int u = 0; u < d; ++u)
        if (u != tinv)
          for (int k = 0; k < len; ++k) f[k] += g[u][k];
      const Series inner = inverse_one_minus(f);
      const double pp = weights[t] * weights[tinv];
      for (int k = 2; k < len; ++k) next[t][k] = pp * inner[k - 2];
    }
    g = std::move(next);
  }
  Series total(len, 0.0);
  for (int t = 0; t < d; ++t)
    for (int k = 0; k < len; ++k) total[k] += g[t][k];
  return inverse_one_minus(total);
}

struct LowerBound {
  double value = 0.0;  // 0 when no m qualified
  int best_m = 0;
  bool qualified = false;
};

namespace detail {

inline LowerBound bound_from_return_probabilities(double n, std::span<const double> r, int m_max) {
  LowerBound out;
  const double n2 = n * n;
  for (int m = 2; m <= m_max; m += 2) {
    const double mass = n2 * r[m];
    if (!(mass > 1.0)) continue;
    const double v = std::pow((mass - 1.0) / n2, 1.0 / m);
    if (!out.qualified || v > out.value) {
      out.value = v;
      out.best_m = m;
      out.qualified = true;
    }
  }
  return out;
}

}  // namespace detail

/// Lower bound on lambda2 valid for every hermitian unitary-Kraus channel with
/// uniform weights: from 1 + N^2 lambda2^m >= N^2 N(0,m) / D^m, maximized over
/// even m <= m_max.
inline LowerBound alon_boppana_lower_bound(int n, int d, int m_max = 20) {
  qexp::detail::require(d >= 4 && d % 2 == 0, "alon_boppana_lower_bound: D must be even and >= 4");
  qexp::detail::require(m_max >= 2 && m_max % 2 == 0, "alon_boppana_lower_bound: m_max must be even and >= 2");
  qexp::detail::require(n >= 1, "alon_boppana_lower_bound: N must be >= 1");
  const WalkTable table(d, m_max);
  std::vector<double> r(m_max + 1);
  for (int m = 0; m <= m_max; ++m) r[m] = table.return_probability(m);
  return detail::bound_from_return_probabilities(n, r, m_max);
}

/// Same bound for pair-weighted channels A(s) = sqrt(P(s)) U(s).
inline LowerBound alon_boppana_lower_bound(int n, std::span<const double> weights, int m_max = 20) {
  qexp::detail::require(m_max >= 2 && m_max % 2 == 0, "alon_boppana_lower_bound: m_max must be even and >= 2");
  qexp::detail::require(n >= 1, "alon_boppana_lower_bound: N must be >= 1");
  const auto r = weighted_return_probabilities(weights, m_max);
  return detail::bound_from_return_probabilities(n, r, m_max);
}

}  // namespace qexp::cayley
