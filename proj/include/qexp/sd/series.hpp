#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qexp/error.hpp"
#include "qexp/sd/rational.hpp"
#include "qexp/sd/step.hpp"
#include "qexp/sd/word.hpp"

namespace qexp::sd {

// Terms that terminated with the same (level, p, q, sign) are logged once with
// their multiplicity. Each has value sign * N^(p - level).
struct TerminationRecord {
  int level = 0;
  int p = 0;  // trivial traces extracted along the path
  int q = 0;  // split steps (groups 1 and 2) along the path
  int sign = 1;
  BigInt count = 0;
};

struct SeriesResult {
  std::size_t m_total = 0;
  std::size_t initial_traces = 0;
  std::vector<BigRational> level_sums;  // level_sums[n-1]: exact sum of terms terminating at level n
  std::vector<BigInt> level_term_counts;  // every term produced at level n, terminated or not
  std::vector<TerminationRecord> terminated;
  double partial_total = 0.0;
  double truncation_bound = 0.0;  // rigorous bound on |exact - partial_total|
  int levels_computed = 0;
  bool exhausted = false;  // no live terms remain; the partial total is exact
};

struct SeriesOptions {
  bool allow_divergent = false;          // permit m_total > N, where convergence is not guaranteed
  std::size_t node_budget = 10'000'000;  // distinct live frontier entries per level
};

class BudgetExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Bound on the unterminated remainder after `levels` levels:
/// (m_total - 1)^levels * N^(m_total - levels).
inline double series_remainder_bound(std::size_t m_total, int levels, double n) {
  if (m_total <= 1) return levels >= 1 ? 0.0 : 1.0;
  return std::exp(levels * std::log(double(m_total - 1)) + (double(m_total) - levels) * std::log(n));
}

/// Breadth-first expansion; level n collects every term that became trivial
/// after n steps. Live terms are merged by (canonical query, p, q, sign).
inline SeriesResult evaluate_series(const ExpectationQuery& query, long n, int n_max, double tol,
                                    const SeriesOptions& options = {}) {
  qexp::detail::require(n >= 1, "evaluate_series: N must be >= 1");
  qexp::detail::require(n_max >= 1, "evaluate_series: n_max must be >= 1");
  ExpectationQuery start = query;
  const int pre_trivial = reduce_query(start);
  qexp::detail::require(pre_trivial == 0, "evaluate_series: query contains trivial traces; factor them out first");

  SeriesResult out;
  out.m_total = start.m_total();
  out.initial_traces = start.traces.size();
  if (!options.allow_divergent && out.m_total > static_cast<std::size_t>(n))
    throw ValidationError("evaluate_series: m_total = " + std::to_string(out.m_total) + " exceeds N = " +
                          std::to_string(n) + "; the series is only guaranteed to converge for m_total <= N");
  if (start.empty()) {
    out.partial_total = 1.0;
    out.exhausted = true;
    return out;
  }

  using FrontierKey = std::tuple<CanonicalKey, int, int, int>;  // key, p, q, sign
  std::map<FrontierKey, BigInt> frontier;
  frontier[{canonical_key(start), 0, 0, 1}] = 1;
  std::map<CanonicalKey, std::vector<SdTerm>> step_cache;
  BigRational total = 0;
  const double log_n = std::log(double(n));

  for (int level = 1; level <= n_max; ++level) {
    std::map<FrontierKey, BigInt> next;
    std::map<std::tuple<int, int, int>, BigInt> ends;  // p, q, sign
    BigInt produced = 0;
    for (const auto& [fkey, count] : frontier) {
      const auto& [key, p, q, sign] = fkey;
      auto it = step_cache.find(key);
      if (it == step_cache.end()) it = step_cache.emplace(key, sd_step(from_key(key))).first;
      for (const SdTerm& term : it->second) {
        produced += count;
        const int p2 = p + term.trivial_traces;
        const int q2 = q + (term.splits() ? 1 : 0);
        const int s2 = sign * term.sign;
        if (term.terminated())
          ends[{p2, q2, s2}] += count;
        else
          next[{canonical_key(term.query), p2, q2, s2}] += count;
      }
    }
    if (next.size() > options.node_budget)
      throw BudgetExceeded("evaluate_series: " + std::to_string(next.size()) + " live terms at level " +
                           std::to_string(level) + " exceed the node budget; use evaluate_exact instead");

    BigRational level_sum = 0;
    for (const auto& [k, count] : ends) {
      const auto& [p, q, sign] = k;
      out.terminated.push_back({level, p, q, sign, count});
      const int e = p - level;
      const BigRational weight = e >= 0 ? BigRational(boost::multiprecision::pow(BigInt(n), e))
                                        : BigRational(1) / BigRational(boost::multiprecision::pow(BigInt(n), -e));
      level_sum += BigRational(sign) * BigRational(count) * weight;
    }
    total += level_sum;
    out.level_sums.push_back(level_sum);
    out.level_term_counts.push_back(produced);
    out.levels_computed = level;
    frontier = std::move(next);
    if (frontier.empty()) {
      out.exhausted = true;
      out.truncation_bound = 0.0;
      break;
    }
    // Each live term is sign * N^(p - level) times a product of k traces, each bounded by N.
    double live = 0.0;
    for (const auto& [fkey, count] : frontier) {
      const auto& [key, p, q, sign] = fkey;
      const auto k = static_cast<double>(from_key(key).traces.size());
      live += static_cast<double>(count) * std::exp((p - level + k) * log_n);
    }
    out.truncation_bound = std::min(live, series_remainder_bound(out.m_total, level, double(n)));
    if (out.truncation_bound <= tol) break;
  }
  out.partial_total = static_cast<double>(total);
  return out;
}

/// floor((k + n) / 3): the most trivial traces a term started from k traces can
/// have collected when it terminates at level n.
inline int max_trivial_traces(std::size_t initial_traces, int level) {
  return (static_cast<int>(initial_traces) + level) / 3;
}

}  // namespace qexp::sd
