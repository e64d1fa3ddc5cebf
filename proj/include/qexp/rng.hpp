#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace qexp {

/// SplitMix64 finalizer; used to derive independent stream seeds.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `stream_index` under `master_seed`.
inline constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(stream_index + 0x632be59bd9b4e019ULL));
}

// Reproducible random source. The engine (mt19937_64) and the seed_seq
// expansion are fully specified by the standard; uniform and normal deviates
// are produced here rather than through std:: distributions, whose algorithms
// are implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t master_seed, std::uint64_t stream_index = 0)
      : master_seed_(master_seed), stream_index_(stream_index) {
    const std::uint64_t s = derive_stream_seed(master_seed, stream_index);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(stream_index)};
    engine_.seed(seq);
  }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// A child stream; distinct indices give independent sequences.
  SeededRng split(std::uint64_t index) const {
    return SeededRng(derive_stream_seed(master_seed_, stream_index_), index);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1); never returns 0.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
  std::complex<double> complex_normal() {
    // Box-Muller; one pair per call.
    const double r = std::sqrt(-std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  double normal() { return std::sqrt(2.0) * complex_normal().real(); }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

}  // namespace qexp
