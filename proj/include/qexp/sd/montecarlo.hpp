#pragma once

#include <cmath>
#include <map>
#include <string>

#include "qexp/error.hpp"
#include "qexp/haar.hpp"
#include "qexp/matrix.hpp"
#include "qexp/rng.hpp"
#include "qexp/sd/word.hpp"

namespace qexp::sd {

struct MonteCarloResult {
  double estimate = 0.0;  // mean of the real part
  double stderr_ = 0.0;
  double imag_mean = 0.0;
  double imag_stderr = 0.0;
  std::size_t samples = 0;
};

/// Product of traces for one draw of the generators.
inline Complex trace_product(const ExpectationQuery& q, const std::map<int, ComplexMatrix>& u) {
  Complex prod = 1.0;
  for (const auto& t : q.traces) {
    ComplexMatrix acc = t.front().inverted ? ComplexMatrix(u.at(t.front().generator).adjoint())
                                           : u.at(t.front().generator);
    for (std::size_t i = 1; i < t.size(); ++i) {
      const ComplexMatrix& m = u.at(t[i].generator);
      acc = t[i].inverted ? ComplexMatrix(acc * m.adjoint()) : ComplexMatrix(acc * m);
    }
    prod *= acc.trace();
  }
  return prod;
}

/// Sample i draws one Haar unitary per generator from stream rng.split(i).
inline MonteCarloResult monte_carlo_expectation(const ExpectationQuery& query, long n, std::size_t samples,
                                                const SeededRng& rng) {
  qexp::detail::require(n >= 1, "monte_carlo_expectation: N must be >= 1");
  qexp::detail::require(samples >= 100, "monte_carlo_expectation: need at least 100 samples");
  ExpectationQuery q = query;
  const int trivial = reduce_query(q);
  const double scale = std::pow(double(n), trivial);
  const auto gens = q.generators();

  double sum_re = 0, sum_re2 = 0, sum_im = 0, sum_im2 = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    SeededRng stream = rng.split(s);
    std::map<int, ComplexMatrix> u;
    for (int g : gens) u.emplace(g, haar_unitary(n, stream));
    const Complex v = scale * trace_product(q, u);
    sum_re += v.real();
    sum_re2 += v.real() * v.real();
    sum_im += v.imag();
    sum_im2 += v.imag() * v.imag();
  }
  const double k = double(samples);
  auto stderr_of = [k](double sum, double sum2) {
    const double mean = sum / k;
    const double var = std::max(0.0, (sum2 - k * mean * mean) / (k - 1));
    return std::sqrt(var / k);
  };
  MonteCarloResult out;
  out.samples = samples;
  out.estimate = sum_re / k;
  out.stderr_ = stderr_of(sum_re, sum_re2);
  out.imag_mean = sum_im / k;
  out.imag_stderr = stderr_of(sum_im, sum_im2);
  // Real expectations only: a large imaginary mean means the sampler or the product is wrong.
  if (std::abs(out.imag_mean) > 5.0 * out.imag_stderr + 1e-12)
    throw NumericalError("monte_carlo_expectation: imaginary mean " + std::to_string(out.imag_mean) +
                         " exceeds 5 standard errors (" + std::to_string(out.imag_stderr) + ")");
  return out;
}

}  // namespace qexp::sd
