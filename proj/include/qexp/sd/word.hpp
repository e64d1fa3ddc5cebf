#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qexp/error.hpp"

namespace qexp::sd {

// U(g) or, when inverted, U(g)^dagger.
struct Letter {
  int generator = 1;
  bool inverted = false;

  Letter inverse() const { return {generator, !inverted}; }
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

// Cyclic word inside one trace.
using TraceWord = std::vector<Letter>;

// E[tr(w_1) tr(w_2) ... tr(w_k)] over independent Haar unitaries, one per generator.
struct ExpectationQuery {
  std::vector<TraceWord> traces;

  bool empty() const { return traces.empty(); }

  std::size_t m_total() const {
    std::size_t m = 0;
    for (const auto& t : traces) m += t.size();
    return m;
  }

  std::vector<int> generators() const {
    std::vector<int> g;
    for (const auto& t : traces)
      for (const auto& l : t) g.push_back(l.generator);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  }

  friend bool operator==(const ExpectationQuery&, const ExpectationQuery&) = default;
};

/// Cyclic free reduction: removes adjacent (including wrap-around) inverse pairs.
inline TraceWord reduce_trace(const TraceWord& word) {
  TraceWord out;
  out.reserve(word.size());
  for (const auto& l : word) {
    if (!out.empty() && out.back() == l.inverse())
      out.pop_back();
    else
      out.push_back(l);
  }
  std::size_t lo = 0, hi = out.size();
  while (hi - lo >= 2 && out[lo] == out[hi - 1].inverse()) {
    ++lo;
    --hi;
  }
  return TraceWord(out.begin() + static_cast<std::ptrdiff_t>(lo), out.begin() + static_cast<std::ptrdiff_t>(hi));
}

/// True when no trace has an adjacent or wrap-around inverse pair.
inline bool is_reduced(const TraceWord& word) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (word[i] == word[i + 1].inverse()) return false;
  return word.size() < 2 || word.front() != word.back().inverse();
}

/// Count of U(g) minus count of U(g)^dagger is zero for every generator.
/// Otherwise the expectation vanishes (U -> e^{i theta} U invariance).
inline bool charge_neutral(const ExpectationQuery& q) {
  std::map<int, int> charge;
  for (const auto& t : q.traces)
    for (const auto& l : t) charge[l.generator] += l.inverted ? -1 : 1;
  return std::all_of(charge.begin(), charge.end(), [](const auto& kv) { return kv.second == 0; });
}

inline std::string to_string(const ExpectationQuery& q) {
  if (q.empty()) return "1";
  std::ostringstream os;
  for (std::size_t t = 0; t < q.traces.size(); ++t) {
    if (t) os << ' ';
    os << "tr(";
    for (std::size_t i = 0; i < q.traces[t].size(); ++i) {
      if (i) os << ' ';
      os << 'U' << q.traces[t][i].generator << (q.traces[t][i].inverted ? "'" : "");
    }
    os << ')';
  }
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const ExpectationQuery& q) { return os << to_string(q); }

//----------------------------------------------------------------------------
// Canonical form
//----------------------------------------------------------------------------

// Flat encoding of a canonical query: for each trace, its length followed by
// letter codes 2*g + inverted (g zero-based). Equal keys <=> equal expectation
// classes under trace reordering, cyclic rotation, generator renaming and
// per-generator U <-> U^dagger exchange.
using CanonicalKey = std::vector<int>;

namespace detail {

struct Naming {
  std::vector<int> name;  // raw dense generator index -> canonical index, -1 if unnamed
  std::vector<bool> flip;
  int next = 0;
};

class Canonicalizer {
 public:
  explicit Canonicalizer(const ExpectationQuery& q) {
    const auto gens = q.generators();
    for (const auto& t : q.traces) {
      std::vector<std::pair<int, bool>> w;
      for (const auto& l : t) {
        const int dense = static_cast<int>(std::lower_bound(gens.begin(), gens.end(), l.generator) - gens.begin());
        w.emplace_back(dense, l.inverted);
      }
      traces_.push_back(std::move(w));
    }
    Naming start;
    start.name.assign(gens.size(), -1);
    start.flip.assign(gens.size(), false);
    std::vector<bool> used(traces_.size(), false);
    std::vector<int> prefix;
    search(start, used, prefix);
  }

  const CanonicalKey& key() const { return best_; }

 private:
  std::vector<int> encode(std::size_t t, std::size_t rot, Naming& naming) const {
    const auto& w = traces_[t];
    std::vector<int> out;
    out.reserve(w.size() + 1);
    out.push_back(static_cast<int>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto [g, inv] = w[(i + rot) % w.size()];
      if (naming.name[g] < 0) {
        naming.name[g] = naming.next++;
        naming.flip[g] = inv;
      }
      out.push_back(2 * naming.name[g] + (inv != naming.flip[g] ? 1 : 0));
    }
    return out;
  }

  void search(const Naming& naming, std::vector<bool>& used, std::vector<int>& prefix) {
    if (found_) {
      // Prune when the prefix already exceeds the best complete key.
      const std::size_t n = std::min(prefix.size(), best_.size());
      if (std::lexicographical_compare(best_.begin(), best_.begin() + n, prefix.begin(), prefix.begin() + n)) return;
    }
    std::size_t remaining = 0;
    for (bool u : used) remaining += !u;
    if (remaining == 0) {
      if (!found_ || prefix < best_) best_ = prefix;
      found_ = true;
      return;
    }
    struct Candidate {
      std::size_t trace;
      Naming naming;
      std::vector<int> code;
    };
    std::vector<Candidate> candidates;
    for (std::size_t t = 0; t < traces_.size(); ++t) {
      if (used[t]) continue;
      // Identical raw traces yield identical branches.
      bool duplicate = false;
      for (std::size_t s = 0; s < t && !duplicate; ++s) duplicate = !used[s] && traces_[s] == traces_[t];
      if (duplicate) continue;
      for (std::size_t r = 0; r < traces_[t].size(); ++r) {
        Naming nm = naming;
        auto code = encode(t, r, nm);
        if (!candidates.empty()) {
          if (code > candidates.front().code) continue;
          if (code < candidates.front().code) candidates.clear();
        }
        bool seen = false;
        for (const auto& c : candidates) seen = seen || (c.trace == t && c.naming.name == nm.name && c.naming.flip == nm.flip);
        if (!seen) candidates.push_back({t, std::move(nm), std::move(code)});
      }
    }
    for (auto& c : candidates) {
      used[c.trace] = true;
      const std::size_t mark = prefix.size();
      prefix.insert(prefix.end(), c.code.begin(), c.code.end());
      search(c.naming, used, prefix);
      prefix.resize(mark);
      used[c.trace] = false;
    }
  }

  std::vector<std::vector<std::pair<int, bool>>> traces_;
  CanonicalKey best_;
  bool found_ = false;
};

}  // namespace detail

inline CanonicalKey canonical_key(const ExpectationQuery& q) { return detail::Canonicalizer(q).key(); }

inline ExpectationQuery from_key(const CanonicalKey& key) {
  ExpectationQuery q;
  for (std::size_t i = 0; i < key.size();) {
    const int len = key[i++];
    TraceWord w;
    for (int j = 0; j < len; ++j, ++i) w.push_back({key[i] / 2 + 1, (key[i] % 2) != 0});
    q.traces.push_back(std::move(w));
  }
  return q;
}

/// Representative of the query's equivalence class: generators 1..g named by
/// first occurrence, each first occurrence un-inverted.
inline ExpectationQuery canonicalize(const ExpectationQuery& q) { return from_key(canonical_key(q)); }

/// Reduce each trace and drop the ones that become trivial; returns how many were dropped.
inline int reduce_query(ExpectationQuery& q) {
  int trivial = 0;
  std::vector<TraceWord> kept;
  for (const auto& t : q.traces) {
    TraceWord r = reduce_trace(t);
    if (r.empty())
      ++trivial;
    else
      kept.push_back(std::move(r));
  }
  q.traces = std::move(kept);
  return trivial;
}

}  // namespace qexp::sd
