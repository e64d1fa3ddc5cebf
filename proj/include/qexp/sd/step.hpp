#pragma once

#include <vector>

#include "qexp/sd/word.hpp"

namespace qexp::sd {

// One term on the right-hand side of a Schwinger-Dyson step. Its weight is
// sign * N^(trivial_traces) / N times the expectation of `query`.
struct SdTerm {
  int sign = 1;
  int group = 0;           // 1: split, same letter; 2: split, inverse; 3: merge, same; 4: merge, inverse
  int trivial_traces = 0;  // traces that reduced to tr(1) in this step
  ExpectationQuery query;  // reduced, trivial traces removed

  bool splits() const { return group == 1 || group == 2; }
  bool terminated() const { return query.empty(); }
};

namespace detail {

inline TraceWord slice(const TraceWord& w, std::size_t begin, std::size_t end) {
  return TraceWord(w.begin() + static_cast<std::ptrdiff_t>(begin), w.begin() + static_cast<std::ptrdiff_t>(end));
}

inline void append_rotated(TraceWord& out, const TraceWord& w, std::size_t from) {
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back(w[(from + i) % w.size()]);
}

}  // namespace detail

/// Expands E[tr(a w_2..w_m) L_2..L_k] with the pivot `a` = first letter of the
/// first trace of the canonical form, against every other letter:
///   same letter at j in the pivot trace   -> -tr(a w_2..w_{j-1}) tr(a w_{j+1}..w_m)
///   inverse at j in the pivot trace       -> +tr(w_2..w_{j-1}) tr(w_{j+1}..w_m)
///   same letter at j in trace l           -> -tr(a w_2..w_m  l_j l_{j+1}..l_{j-1})
///   inverse at j in trace l               -> +tr(w_2..w_m  l_{j+1}..l_{j-1})
/// each with an overall 1/N. Children are reduced and trivial traces counted.
inline std::vector<SdTerm> sd_step(const ExpectationQuery& query) {
  qexp::detail::require(!query.empty(), "sd_step: query has no traces");
  const ExpectationQuery q = canonicalize(query);
  const TraceWord& pivot_trace = q.traces.front();
  const Letter a = pivot_trace.front();
  const std::size_t m1 = pivot_trace.size();
  const std::vector<TraceWord> rest(q.traces.begin() + 1, q.traces.end());

  std::vector<SdTerm> out;
  auto emit = [&out](int sign, int group, std::vector<TraceWord> traces) {
    SdTerm term;
    term.sign = sign;
    term.group = group;
    term.query.traces = std::move(traces);
    term.trivial_traces = reduce_query(term.query);
    out.push_back(std::move(term));
  };

  for (std::size_t j = 1; j < m1; ++j) {
    const Letter l = pivot_trace[j];
    if (l == a) {
      std::vector<TraceWord> traces{detail::slice(pivot_trace, 0, j), detail::slice(pivot_trace, j, m1)};
      traces.insert(traces.end(), rest.begin(), rest.end());
      emit(-1, 1, std::move(traces));
    } else if (l == a.inverse()) {
      std::vector<TraceWord> traces{detail::slice(pivot_trace, 1, j), detail::slice(pivot_trace, j + 1, m1)};
      traces.insert(traces.end(), rest.begin(), rest.end());
      emit(+1, 2, std::move(traces));
    }
  }
  for (std::size_t t = 0; t < rest.size(); ++t) {
    std::vector<TraceWord> others;
    for (std::size_t u = 0; u < rest.size(); ++u)
      if (u != t) others.push_back(rest[u]);
    const TraceWord& other = rest[t];
    for (std::size_t j = 0; j < other.size(); ++j) {
      if (other[j] == a) {
        TraceWord merged = pivot_trace;
        detail::append_rotated(merged, other, j);
        std::vector<TraceWord> traces{std::move(merged)};
        traces.insert(traces.end(), others.begin(), others.end());
        emit(-1, 3, std::move(traces));
      } else if (other[j] == a.inverse()) {
        TraceWord merged = detail::slice(pivot_trace, 1, m1);
        TraceWord tail;
        detail::append_rotated(tail, other, j);
        merged.insert(merged.end(), tail.begin() + 1, tail.end());
        std::vector<TraceWord> traces{std::move(merged)};
        traces.insert(traces.end(), others.begin(), others.end());
        emit(+1, 4, std::move(traces));
      }
    }
  }
  return out;
}

}  // namespace qexp::sd
