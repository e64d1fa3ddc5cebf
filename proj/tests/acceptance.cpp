// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qexp/qexp.hpp"

using namespace qexp;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s [%s] (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Channels shared between the spectral-gap and lower-bound criteria.
ExperimentConfig gap_config() {
  ExperimentConfig c;
  c.N_list = {50};
  c.D = 4;
  c.trials = 10;
  c.master_seed = 20240601;
  c.timing = false;
  return c;
}

std::vector<ExperimentRecord> hermitian_records;

Outcome concentration() {
  hermitian_records = run_sweep(gap_config()).records;
  std::vector<double> l2;
  double worst = 0.0;
  for (const auto& r : hermitian_records) {
    if (r.failed()) return {false, "run failed: " + r.error};
    l2.push_back(r.lambda2);
    worst = std::max(worst, std::abs(r.lambda2 - 0.86603));
  }
  std::sort(l2.begin(), l2.end());
  const double median = 0.5 * (l2[4] + l2[5]);
  const bool ok = std::abs(median - 0.86603) <= 0.05 && worst <= 0.10;
  return {ok, "median " + fmt(median) + ", min " + fmt(l2.front()) + ", max " + fmt(l2.back())};
}

Outcome lower_bound() {
  if (hermitian_records.size() != 10) return {false, "criterion 1 channels unavailable"};
  int checked = 0, bad = 0;
  double min_margin = INFINITY;
  for (const auto& r : hermitian_records) {
    const double lb = cayley::alon_boppana_lower_bound(r.N, r.D, 20).value;
    min_margin = std::min(min_margin, r.lambda2 - lb);
    bad += r.lambda2 < lb - 1e-9;
    ++checked;
  }
  ExperimentConfig w = gap_config();
  w.construction = "weighted";
  w.trials = 5;
  w.master_seed += 1;
  for (int t = 0; t < w.trials; ++t) {
    const Channel c = build_for(w.construction, 50, w.D, run_seed(w.master_seed, 50, t));
    const double l2 = eigen_spectrum(c).lambda2;
    const double uniform_lb = cayley::alon_boppana_lower_bound(50, w.D, 20).value;
    const double weighted_lb = cayley::alon_boppana_lower_bound(50, c.weights(), 20).value;
    min_margin = std::min(min_margin, l2 - std::max(uniform_lb, weighted_lb));
    bad += l2 < uniform_lb - 1e-9;
    bad += l2 < weighted_lb - 1e-9;
    ++checked;
  }
  return {bad == 0, std::to_string(checked) + " channels, " + std::to_string(bad) + " violations, min margin " +
                        fmt(min_margin)};
}

sd::ExpectationQuery parse(const char* text) { return sd::parse_trace_expr(text).query; }

Outcome sd_exact_values() {
  const auto a = sd::evaluate_exact(parse("tr(U1) tr(U1')"));
  const auto b = sd::evaluate_exact(parse("tr(U1 U1) tr(U1' U1')"));
  bool ok = a == sd::RationalInN(1) && b == sd::RationalInN(2);
  const auto s = sd::evaluate_series(parse("tr(U1 U1) tr(U1' U1')"), 16, 12, 0.0);
  int nonzero = 0;
  for (std::size_t n = 1; n < s.level_sums.size(); ++n) nonzero += s.level_sums[n] != 0;
  ok = ok && nonzero == 0 && s.level_sums.at(0) == 2;
  return {ok, "values " + a.to_string() + " and " + b.to_string() + ", " + std::to_string(s.levels_computed) +
                  " series levels, " + std::to_string(nonzero) + " nonzero beyond level 1"};
}

const char* const CORPUS[] = {
    "tr(U1) tr(U1')",
    "tr(U1 U1) tr(U1' U1')",
    "tr(U1 U2) tr(U2' U1')",
    "tr(U1 U2) tr(U1' U2')",
    "tr(U1 U1 U1) tr(U1' U1' U1')",
    "tr(U1 U2 U1' U2') tr(U2 U1 U2' U1')",
    "tr(U1 U1 U1 U1) tr(U1' U1' U1' U1')",
    "tr(U1 U2 U1 U2) tr(U2' U1' U2' U1')",
};

Outcome sd_invariants() {
  int violations = 0;
  std::size_t terminated = 0;
  for (const char* text : CORPUS) {
    const auto q = parse(text);
    if (q.m_total() > 8) return {false, std::string("corpus query too long: ") + text};
    const auto s = sd::evaluate_series(q, 16, 9, 0.0);
    for (const auto& t : s.terminated) {
      ++terminated;
      violations += t.p > (2 + t.level) / 3;
      violations += t.level == 2;
    }
    for (std::size_t n = 1; n <= s.level_term_counts.size(); ++n)
      violations += s.level_term_counts[n - 1] > boost::multiprecision::pow(sd::BigInt(q.m_total() - 1), int(n));
  }
  return {violations == 0, std::to_string(std::size(CORPUS)) + " queries, " + std::to_string(terminated) +
                               " termination records, " + std::to_string(violations) + " violations"};
}

Outcome oracle_agreement() {
  const auto start = Clock::now();
  int bad = 0;
  double worst = 0.0;
  const SeededRng rng(777);
  std::uint64_t stream = 0;
  for (const char* text : CORPUS) {
    const auto q = parse(text);
    const auto exact = sd::evaluate_exact(q);
    for (long n : {16L, 32L}) {
      const double e = exact(double(n));
      const auto mc = sd::monte_carlo_expectation(q, n, 10000, rng.split(stream++));
      const double z = std::abs(e - mc.estimate) / std::max(mc.stderr_, 1e-300);
      worst = std::max(worst, mc.stderr_ > 0 ? z : (e == mc.estimate ? 0.0 : INFINITY));
      bad += std::abs(e - mc.estimate) > 4 * mc.stderr_ + 1e-12;
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {bad == 0 && secs <= 180.0, std::to_string(bad) + " disagreements, worst |z| " + fmt(worst) + ", " +
                                         fmt(secs) + " s"};
}

// Reduced-length histogram over all D^m words, by depth-first search with an
// explicit stack of reduced letters.
std::vector<std::vector<long long>> enumerate_walks(int d, int m_max) {
  std::vector<std::vector<long long>> counts(m_max + 1, std::vector<long long>(m_max + 1, 0));
  std::vector<int> stack;
  std::function<void(int)> dfs = [&](int depth) {
    ++counts[depth][stack.size()];
    if (depth == m_max) return;
    for (int s = 1; s <= d; ++s) {
      const int inv = (s - 1 + d / 2) % d + 1;
      if (!stack.empty() && stack.back() == inv) {
        stack.pop_back();
        dfs(depth + 1);
        stack.push_back(inv);
      } else {
        stack.push_back(s);
        dfs(depth + 1);
        stack.pop_back();
      }
    }
  };
  dfs(0);
  return counts;
}

Outcome cayley_exactness() {
  int bad = 0;
  for (int d : {4, 6}) {
    const auto t = cayley::walk_counts(d, 10);
    const auto bf = enumerate_walks(d, 10);
    for (int m = 0; m <= 10; ++m)
      for (int l = 0; l <= 10; ++l)
        if (t.count(l, m) != cayley::BigInt(bf[m][l])) ++bad;
  }
  for (int d : {2, 4, 6}) {
    const auto t = cayley::walk_counts(d, 40);
    bad += t.count(0, 2) != d;
    bad += t.count(0, 4) != cayley::BigInt(d) * (2 * d - 1);
    for (int m = 2; m <= 40; m += 2) {
      cayley::BigInt central = 1;
      for (int i = 1; i <= m / 2; ++i) central = central * (m / 2 + i) / i;
      bad += t.count(0, m) > boost::multiprecision::pow(cayley::BigInt(d - 1), m / 2) * central;
    }
  }
  return {bad == 0, std::to_string(bad) + " mismatches"};
}

Outcome nonhermitian_bounds() {
  ExperimentConfig c = gap_config();
  c.construction = "nonhermitian";
  c.trials = 5;
  c.master_seed += 2;
  double worst = 0.0;
  int bad = 0;
  for (int t = 0; t < c.trials; ++t) {
    const Channel ch = build_for(c.construction, 50, c.D, run_seed(c.master_seed, 50, t));
    const auto s = eigen_spectrum(ch);
    worst = std::max(worst, s.lambda2);
    const auto fro = frobenius_moments(ch, 6);
    for (int m = 1; m <= 6; ++m) bad += fro[m - 1] < 2500.0 * std::pow(4.0, -m) - 1e-9;
  }
  return {worst <= 0.62 && bad == 0, "max non-unit modulus " + fmt(worst) + ", " + std::to_string(bad) +
                                         " moment violations"};
}

Outcome channel_contracts() {
  SeededRng rng(31);
  const int ns[] = {8, 16, 32};
  const int ds[] = {4, 6};
  const char* kinds[] = {"hermitian", "weighted", "nonhermitian"};
  double unital = 0, trace = 0, faithful = 0, symmetric = 0, residual = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = ns[k % 3], d = ds[(k / 3) % 2];
    const Channel c = build_for(kinds[(k / 2) % 3], n, d, derive_stream_seed(31, k));
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix m = complex_ginibre(n, rng);
    unital = std::max(unital, max_abs(ComplexMatrix(qexp::apply(c, id) - id)));
    trace = std::max(trace, std::abs(qexp::apply(c, m).trace() - m.trace()));
    const ComplexMatrix s = superoperator(c);
    faithful = std::max(faithful, max_abs(ComplexVector(s * vec(m) - vec(qexp::apply(c, m)))));
    if (c.hermitian()) symmetric = std::max(symmetric, max_abs(ComplexMatrix(s - s.adjoint())));
    residual = std::max(residual, unit_eigenvector_residual(c));
  }
  const double worst = std::max({unital, trace, faithful, symmetric, residual});
  return {worst <= 1e-10, "unitality " + fmt(unital) + ", trace " + fmt(trace) + ", vec " + fmt(faithful) +
                              ", symmetry " + fmt(symmetric) + ", unit residual " + fmt(residual)};
}

Outcome appendix_theorems() {
  SeededRng rng(41);
  double min_slack = INFINITY;
  for (int k = 0; k < 10; ++k) {
    const int n = 8 + 2 * k;
    const Channel c = build_for(k % 2 ? "weighted" : "hermitian", n, 4 + 2 * (k % 2), derive_stream_seed(41, k));
    const double l2 = eigen_spectrum(c).lambda2;
    for (int p = 0; p < 100; ++p)
      min_slack = std::min(min_slack, converse_check(c, random_projector(n, 1 + p % (n / 2), rng), l2).slack);
  }
  int chain_bad = 0;
  double worst_trace = 0.0, worst_gap = -INFINITY;
  for (int k = 0; k < 10; ++k) {
    const int n = k < 5 ? 20 : 30;
    const Channel c = build_for("hermitian", n, 4, derive_stream_seed(43, k));
    const auto r = tanner_chain_check(c);
    chain_bad += !(r.lhs <= r.rhs + 1e-8);
    worst_gap = std::max(worst_gap, r.lhs - r.rhs);
    worst_trace = std::max(worst_trace, r.trace_residual);
  }
  const bool ok = min_slack >= -1e-8 && chain_bad == 0 && worst_trace <= 1e-8;
  return {ok, "min converse slack " + fmt(min_slack) + ", chain failures " + std::to_string(chain_bad) +
                  ", max lhs - rhs " + fmt(worst_gap) + ", max |tr X| " + fmt(worst_trace)};
}

Outcome scaling_collapse() {
  ExperimentConfig c;
  c.N_list = {20, 30, 50};
  c.D = 4;
  c.master_seed = 20240602;
  c.timing = false;
  const auto sweep = run_sweep(c, true);
  std::vector<CollapseCurve> curves;
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    if (sweep.records[i].failed()) return {false, "run failed: " + sweep.records[i].error};
    curves.push_back({sweep.records[i].N, sweep.spectra[i]});
  }
  const auto dir = std::filesystem::temp_directory_path() / "qexp_acceptance_collapse";
  const auto report = emit_collapse(dir, curves);
  bool ok = report.distance_from == 30 && report.distance_to == 50 && report.quantile_distance <= 0.08;
  for (const auto& curve : report.curves) {
    ok = ok && curve.eigenvalues.size() == std::size_t(curve.N) * curve.N;
    for (std::size_t i = 1; i < curve.eigenvalues.size(); ++i) ok = ok && curve.eigenvalues[i] <= curve.eigenvalues[i - 1];
  }
  std::filesystem::remove_all(dir);
  return {ok, "distance N=30 to N=50 " + fmt(report.quantile_distance)};
}

}  // namespace

int main() {
  run(1, "second eigenvalue concentrates near sqrt(3)/2", concentration);
  run(2, "second eigenvalue respects the walk lower bound", lower_bound);
  run(3, "exact Haar expectations of the worked examples", sd_exact_values);
  run(4, "series invariants over the regression corpus", sd_invariants);
  run(5, "exact values agree with Monte Carlo", oracle_agreement);
  run(6, "tree walk counts are exact", cayley_exactness);
  run(7, "non-hermitian spectrum and moment bounds", nonhermitian_bounds);
  run(8, "channel and superoperator contracts", channel_contracts);
  run(9, "converse and chain inequalities", appendix_theorems);
  run(10, "scaling collapse", scaling_collapse);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
