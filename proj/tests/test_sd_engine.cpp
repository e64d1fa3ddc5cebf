#include <catch_amalgamated.hpp>

#include <cmath>

#include "qexp/sd/exact.hpp"
#include "qexp/sd/montecarlo.hpp"
#include "qexp/sd/parse.hpp"
#include "qexp/sd/series.hpp"
#include "qexp/sd/step.hpp"

using namespace qexp;
using namespace qexp::sd;
using Catch::Matchers::WithinAbs;

namespace {

ExpectationQuery q(const char* text) { return parse_trace_expr(text).query; }

RationalInN exact(const char* text) { return evaluate_exact(q(text)); }

RationalInN rat(int p) { return RationalInN(p); }

}  // namespace

TEST_CASE("sd_step on tr(UU) tr(U'U')", "[sd][step]") {
  const auto terms = sd_step(q("tr(U1 U1) tr(U1' U1')"));
  REQUIRE(terms.size() == 3);
  int group1 = 0, group4 = 0;
  for (const auto& t : terms) {
    if (t.group == 1) {
      ++group1;
      CHECK(t.sign == -1);
      CHECK(t.trivial_traces == 0);
      CHECK(canonical_key(t.query) == canonical_key(q("tr(U1) tr(U1) tr(U1' U1')")));
    } else {
      ++group4;
      CHECK(t.group == 4);
      CHECK(t.sign == 1);
      CHECK(t.trivial_traces == 1);
      CHECK(t.terminated());
    }
  }
  CHECK(group1 == 1);
  CHECK(group4 == 2);
}

TEST_CASE("sd_step edge cases", "[sd][step]") {
  CHECK(sd_step(q("tr(U1)")).empty());
  const auto t = sd_step(q("tr(U1 U2) tr(U2' U1')"));
  REQUIRE(t.size() == 1);
  CHECK(t[0].group == 4);
  CHECK(t[0].terminated());
  CHECK(t[0].trivial_traces == 1);
  CHECK_THROWS_AS(sd_step(ExpectationQuery{}), ValidationError);

  // Inverse inside the pivot trace: tr(U1 U2 U1' U2') -> +tr(U2) tr(U2').
  const auto c = sd_step(q("tr(U1 U2 U1' U2')"));
  REQUIRE(c.size() == 1);
  CHECK(c[0].group == 2);
  CHECK(c[0].sign == 1);
  CHECK(canonical_key(c[0].query) == canonical_key(q("tr(U1) tr(U1')")));
}

TEST_CASE("children never exceed m_total - 1", "[sd][step]") {
  for (const char* text : {"tr(U1 U1 U1) tr(U1' U1' U1')", "tr(U1 U2 U1 U2) tr(U2' U1' U2' U1')",
                           "tr(U1 U2 U1' U2') tr(U2 U1 U2' U1')", "tr(U1) tr(U1) tr(U1') tr(U1')"}) {
    const auto query = q(text);
    CHECK(sd_step(query).size() <= query.m_total() - 1);
  }
}

TEST_CASE("series examples", "[sd][series]") {
  const auto a = evaluate_series(q("tr(U1) tr(U1')"), 10, 8, 0.0);
  REQUIRE(a.level_sums.size() == 1);
  CHECK(a.level_sums[0] == 1);
  CHECK(a.exhausted);
  CHECK(a.partial_total == 1.0);

  const auto b = evaluate_series(q("tr(U1 U1) tr(U1' U1')"), 10, 12, 1e-6);
  CHECK(b.level_sums[0] == 2);
  for (std::size_t n = 1; n < b.level_sums.size(); ++n) CHECK(b.level_sums[n] == 0);
  CHECK(std::abs(b.partial_total - 2.0) <= b.truncation_bound);
  CHECK(b.truncation_bound <= 1e-6);

  const auto c = evaluate_series(q("tr(U1)"), 7, 5, 0.0);
  CHECK(c.partial_total == 0.0);
  CHECK(c.exhausted);

  const auto e = evaluate_series(ExpectationQuery{}, 4, 3, 0.0);
  CHECK(e.partial_total == 1.0);
}

TEST_CASE("higher series levels need not vanish", "[sd][series]") {
  // Commutator traces: exact value N^2/(N^2 - 1) = 1 + N^-2 + N^-4 + ...
  const auto s = evaluate_series(q("tr(U1 U2 U1' U2') tr(U2 U1 U2' U1')"), 16, 9, 0.0);
  REQUIRE(s.level_sums.size() == 9);
  const BigRational expected[] = {1, 0, 0, BigRational(1, 256), BigRational(1, 65536), 0, BigRational(1, 16777216), 0,
                                  BigRational(1, 4294967296LL)};
  for (std::size_t n = 0; n < 9; ++n) CHECK(s.level_sums[n] == expected[n]);
  CHECK_FALSE(s.exhausted);
  CHECK(std::abs(s.partial_total - 256.0 / 255.0) <= s.truncation_bound);
}

TEST_CASE("series preconditions and budget", "[sd][series]") {
  CHECK_THROWS_AS(evaluate_series(q("tr(U1 U1 U1) tr(U1' U1' U1')"), 4, 5, 0.0), ValidationError);
  SeriesOptions allow;
  allow.allow_divergent = true;
  CHECK_NOTHROW(evaluate_series(q("tr(U1 U1 U1) tr(U1' U1' U1')"), 4, 3, 0.0, allow));
  SeriesOptions tiny;
  tiny.node_budget = 1;
  CHECK_THROWS_AS(evaluate_series(q("tr(U1 U2 U1' U2') tr(U2 U1 U2' U1')"), 16, 6, 0.0, tiny), BudgetExceeded);
  try {
    evaluate_series(q("tr(U1 U2 U1' U2') tr(U2 U1 U2' U1')"), 16, 6, 0.0, tiny);
  } catch (const NumericalError& err) {
    CHECK(std::string(err.what()).find("evaluate_exact") != std::string::npos);
  }
}

TEST_CASE("the a priori remainder bound decreases once N exceeds m_total - 1", "[sd][series]") {
  double prev = INFINITY;
  for (int n = 1; n <= 10; ++n) {
    const double b = series_remainder_bound(6, n, 16.0);
    CHECK(b < prev);
    prev = b;
  }
  CHECK_THAT(series_remainder_bound(4, 2, 10.0), WithinAbs(9.0 * 100.0, 1e-9));
}

TEST_CASE("exact values", "[sd][exact]") {
  CHECK(exact("tr(U1) tr(U1')") == rat(1));
  CHECK(exact("tr(U1 U1) tr(U1' U1')") == rat(2));
  CHECK(exact("tr(U1 U2) tr(U2' U1')") == rat(1));
  CHECK(exact("tr(U1 U1 U1) tr(U1' U1' U1')") == rat(3));
  CHECK(exact("tr(U1) tr(U1) tr(U1') tr(U1')") == rat(2));
  CHECK(exact("tr(U1) tr(U1) tr(U1' U1')") == rat(0));
  CHECK(exact("tr(U1)") == rat(0));
  CHECK(exact("tr(U1 U1)") == rat(0));
  CHECK(exact("tr(U1 U2 U1' U2')").to_string() == "1/N");
  CHECK(exact("tr(U1 U2 U1' U2') tr(U2 U1 U2' U1')").to_string() == "N^2/(N^2 - 1)");
  // A trivial trace contributes N.
  ExpectationQuery with_trivial;
  with_trivial.traces = {{{1, false}, {1, true}}, {{2, false}}, {{2, true}}};
  CHECK(evaluate_exact(with_trivial) == RationalInN::N());
}

TEST_CASE("exact agrees with the series within its bound", "[sd][exact]") {
  for (const char* text : {"tr(U1 U2 U1' U2') tr(U2 U1 U2' U1')", "tr(U1 U2 U1 U2) tr(U2' U1' U2' U1')",
                           "tr(U1 U2 U1' U2') tr(U1 U2 U1' U2')", "tr(U1 U1 U2) tr(U1' U1' U2')"}) {
    const auto query = q(text);
    const double ex = evaluate_exact(query)(16.0);
    const auto s = evaluate_series(query, 16, 10, 0.0);
    CHECK(std::abs(s.partial_total - ex) <= s.truncation_bound + 1e-14);
  }
}

TEST_CASE("exact is invariant under relabeling", "[sd][exact]") {
  const auto a = exact("tr(U1 U2 U1' U2') tr(U1 U1 U2') tr(U1' U1')");
  CHECK(exact("tr(U2 U1' U2' U1) tr(U2 U2 U1) tr(U2' U2')") == a);
  CHECK(exact("tr(U1' U1') tr(U1 U2 U1' U2') tr(U1 U1 U2')") == a);
  CHECK(exact("tr(U3' U4 U3 U4') tr(U3' U3' U4') tr(U3 U3)") == a);
}

TEST_CASE("exact respects the letter budget", "[sd][exact]") {
  ExactOptions small;
  small.letter_budget = 4;
  CHECK_THROWS_AS(evaluate_exact(q("tr(U1 U1 U1) tr(U1' U1' U1')"), small), ValidationError);
  // Without charge pruning the zero states are solved rather than assumed.
  ExactOptions full;
  full.prune_charged = false;
  CHECK(evaluate_exact(q("tr(U1 U1) tr(U1' U1')"), full) == rat(2));
  CHECK(evaluate_exact(q("tr(U1 U1) tr(U1')"), full) == rat(0));
}

TEST_CASE("Monte Carlo oracle", "[sd][mc]") {
  const SeededRng rng(99);
  const auto a = monte_carlo_expectation(q("tr(U1) tr(U1')"), 16, 4000, rng);
  CHECK(std::abs(a.estimate - 1.0) <= 4 * a.stderr_);
  const auto b = monte_carlo_expectation(q("tr(U1)"), 16, 4000, rng.split(1));
  CHECK(std::abs(b.estimate) <= 4 * b.stderr_);
  const auto c = monte_carlo_expectation(q("tr(U1 U2) tr(U1' U2')"), 8, 4000, rng.split(2));
  CHECK(std::abs(c.estimate - 1.0) <= 4 * c.stderr_);
  const auto d = monte_carlo_expectation(q("tr(U1 U2 U1' U2')"), 8, 4000, rng.split(3));
  CHECK(std::abs(d.estimate - 0.125) <= 4 * d.stderr_ + 1e-12);
  CHECK(a.samples == 4000);
  CHECK_THROWS_AS(monte_carlo_expectation(q("tr(U1)"), 16, 99, rng), ValidationError);

  // Same rng, same estimate.
  CHECK(monte_carlo_expectation(q("tr(U1) tr(U1')"), 16, 200, rng).estimate ==
        monte_carlo_expectation(q("tr(U1) tr(U1')"), 16, 200, rng).estimate);
}
