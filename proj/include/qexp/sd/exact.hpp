#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "qexp/error.hpp"
#include "qexp/sd/rational.hpp"
#include "qexp/sd/step.hpp"
#include "qexp/sd/word.hpp"

namespace qexp::sd {

struct ExactOptions {
  std::size_t letter_budget = 10;
  bool prune_charged = true;  // charge-nonneutral states are zero by phase invariance
};

namespace detail {

// One equation  N x_K - sum_c sign_c N^{p_c} x_c = sum_t sign_t N^{p_t}.
struct StateEquation {
  std::size_t letters = 0;
  bool zero = false;  // known to vanish without solving
  std::map<CanonicalKey, RationalInN> coupling;  // child -> sign * N^p, summed over duplicates
  RationalInN constant;                          // terminated children
};

inline std::string key_text(const CanonicalKey& key) { return to_string(from_key(key)); }

class ExactSolver {
 public:
  explicit ExactSolver(const ExactOptions& options) : options_(options) {}

  RationalInN solve(const ExpectationQuery& start) {
    const CanonicalKey root = canonical_key(start);
    explore(root);
    std::map<std::size_t, std::vector<CanonicalKey>> blocks;
    for (const auto& [key, eq] : equations_)
      if (!eq.zero) blocks[eq.letters].push_back(key);
    for (const auto& [letters, keys] : blocks) solve_block(keys);
    return value_of(root);
  }

  std::size_t state_count() const { return equations_.size(); }

 private:
  void explore(const CanonicalKey& root) {
    std::deque<CanonicalKey> queue{root};
    while (!queue.empty()) {
      const CanonicalKey key = std::move(queue.front());
      queue.pop_front();
      if (equations_.count(key)) continue;
      const ExpectationQuery q = from_key(key);
      StateEquation& eq = equations_[key];
      eq.letters = q.m_total();
      if (options_.prune_charged && !charge_neutral(q)) {
        eq.zero = true;
        continue;
      }
      for (const SdTerm& term : sd_step(q)) {
        const RationalInN w = RationalInN(term.sign) * RationalInN::power_of_N(term.trivial_traces);
        if (term.terminated()) {
          eq.constant += w;
          continue;
        }
        CanonicalKey child = canonical_key(term.query);
        eq.coupling[child] += w;
        if (!equations_.count(child)) queue.push_back(std::move(child));
      }
    }
  }

  RationalInN value_of(const CanonicalKey& key) const {
    const auto& eq = equations_.at(key);
    if (eq.zero) return RationalInN();
    return values_.at(key);
  }

  // Gauss-Jordan over rational functions. Children with fewer letters are already solved.
  void solve_block(const std::vector<CanonicalKey>& keys) {
    const std::size_t n = keys.size();
    std::map<CanonicalKey, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[keys[i]] = i;
    std::vector<std::vector<RationalInN>> a(n, std::vector<RationalInN>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
      const StateEquation& eq = equations_.at(keys[i]);
      a[i][i] = RationalInN::N();
      RationalInN rhs = eq.constant;
      for (const auto& [child, w] : eq.coupling) {
        auto it = index.find(child);
        if (it != index.end())
          a[i][it->second] -= w;
        else
          rhs += w * value_of(child);
      }
      a[i][n] = rhs;
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = n;
      for (std::size_t r = col; r < n; ++r) {
        if (a[r][col].is_zero()) continue;
        // Prefer the lowest-degree pivot to keep intermediate expressions small.
        if (pivot == n || a[r][col].numerator().degree() + a[r][col].denominator().degree() <
                              a[pivot][col].numerator().degree() + a[pivot][col].denominator().degree())
          pivot = r;
      }
      if (pivot == n)
        throw NumericalError("evaluate_exact: singular system at state " + key_text(keys[col]));
      std::swap(a[col], a[pivot]);
      const RationalInN inv = RationalInN(1) / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[col][c] = a[col][c] * inv;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || a[r][col].is_zero()) continue;
        const RationalInN f = a[r][col];
        for (std::size_t c = col; c <= n; ++c)
          if (!a[col][c].is_zero()) a[r][c] -= f * a[col][c];
      }
    }
    // Row swaps keep column order, so row i now holds unknown keys[i].
    for (std::size_t i = 0; i < n; ++i) values_[keys[i]] = a[i][n];
  }

  ExactOptions options_;
  std::map<CanonicalKey, StateEquation> equations_;
  std::map<CanonicalKey, RationalInN> values_;
};

}  // namespace detail

/// E[tr(w_1)...tr(w_k)] as an exact rational function of N, valid for
/// N >= m_total. Trivial traces in the input contribute a factor N each.
inline RationalInN evaluate_exact(const ExpectationQuery& query, const ExactOptions& options = {}) {
  ExpectationQuery q = query;
  const int trivial = reduce_query(q);
  const RationalInN scale = RationalInN::power_of_N(trivial);
  if (q.m_total() > options.letter_budget)
    throw ValidationError("evaluate_exact: m_total = " + std::to_string(q.m_total()) +
                          " exceeds the letter budget of " + std::to_string(options.letter_budget));
  if (q.empty()) return scale;
  if (options.prune_charged && !charge_neutral(q)) return RationalInN();
  return scale * detail::ExactSolver(options).solve(q);
}

}  // namespace qexp::sd
