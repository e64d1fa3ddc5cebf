#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qexp/cayley.hpp"
#include "qexp/channel.hpp"
#include "qexp/error.hpp"
#include "qexp/rng.hpp"
#include "qexp/spectrum.hpp"

namespace qexp {

struct ExperimentConfig {
  std::string construction = "hermitian";  // hermitian | nonhermitian | weighted
  std::vector<int> N_list{20, 30, 50};
  int D = 4;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::string output_dir = ".";
  int m_max = 20;
  int threads = 1;
  bool timing = true;  // false writes wall_ms = 0 so repeated runs are byte-identical
};

namespace detail {

inline std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  T value{};
  if (!(is >> value) || !(is >> std::ws).eof())
    throw ValidationError("config: bad value for '" + key + "': '" + text + "'");
  return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ValidationError("config: bad value for '" + key + "': '" + text + "'");
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) throw ValidationError("config: '" + key + "' is empty");
  return out;
}

}  // namespace detail

/// Sets one key of the config from its text value.
inline void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "construction")
    c.construction = value;
  else if (key == "N_list")
    c.N_list = parse_int_list(key, value);
  else if (key == "D")
    c.D = parse_number<int>(key, value);
  else if (key == "trials")
    c.trials = parse_number<int>(key, value);
  else if (key == "master_seed")
    c.master_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "output_dir")
    c.output_dir = value;
  else if (key == "m_max")
    c.m_max = parse_number<int>(key, value);
  else if (key == "threads")
    c.threads = parse_number<int>(key, value);
  else if (key == "timing")
    c.timing = parse_bool(key, value);
  else
    throw ValidationError("config: unknown key '" + key + "'");
}

/// Flat key=value lines; '#' starts a comment.
inline ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: line " + std::to_string(lineno) + " is not key=value");
    set_config_value(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return base;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  return parse_config(in, std::move(base));
}

inline void validate(const ExperimentConfig& c) {
  using detail::require;
  require(c.construction == "hermitian" || c.construction == "nonhermitian" || c.construction == "weighted",
          "config: construction must be hermitian, nonhermitian or weighted");
  require(c.trials >= 1, "config: trials must be >= 1");
  require(c.threads >= 1, "config: threads must be >= 1");
  require(c.m_max >= 2 && c.m_max <= 64, "config: m_max must be in 2..64");
  require(!c.N_list.empty(), "config: N_list is empty");
  for (int n : c.N_list) require(n >= 2 && n <= 64, "config: every N must be in 2..64");
  if (c.construction == "nonhermitian")
    require(c.D >= 2, "config: nonhermitian construction needs D >= 2");
  else
    require(c.D >= 4 && c.D % 2 == 0, "config: hermitian constructions need even D >= 4");
}

struct ExperimentRecord {
  int N = 0;
  int D = 0;
  std::uint64_t seed = 0;
  std::string construction;
  double lambda2 = NAN;
  double lambda_H = NAN;
  double lambda_nH = NAN;
  double alon_boppana_lb = NAN;
  bool gap_ok = false;
  double wall_ms = 0.0;
  std::string error;  // nonempty when the run failed

  bool failed() const { return !error.empty(); }
};

struct SweepResult {
  std::vector<ExperimentRecord> records;
  std::vector<std::vector<double>> spectra;  // real parts, descending; empty unless requested
};

/// Seed of run (N, trial); independent of run order and thread count.
inline std::uint64_t run_seed(std::uint64_t master_seed, int n, int trial) {
  return derive_stream_seed(master_seed, (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(trial));
}

inline Channel build_for(const std::string& construction, int n, int d, std::uint64_t seed) {
  SeededRng rng(seed);
  if (construction == "hermitian") return build_hermitian_random(n, d, rng);
  if (construction == "weighted") return build_weighted_hermitian_random(n, d, rng);
  if (construction == "nonhermitian") return build_nonhermitian_random(n, d, rng);
  throw ValidationError("unknown construction '" + construction + "'");
}

namespace detail {

inline ExperimentRecord run_one(const ExperimentConfig& c, int n, int trial, std::vector<double>* spectrum) {
  ExperimentRecord r;
  r.N = n;
  r.D = c.D;
  r.seed = run_seed(c.master_seed, n, trial);
  r.construction = c.construction;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Channel channel = build_for(c.construction, n, c.D, r.seed);
    const SuperopSpectrum s = eigen_spectrum(channel);
    const BenchmarkConstants b = benchmark_values(c.D);
    r.lambda2 = s.lambda2;
    r.lambda_H = b.lambda_H;
    r.lambda_nH = b.lambda_nH;
    if (channel.hermitian()) {
      r.alon_boppana_lb = channel.uniform_weights()
                              ? cayley::alon_boppana_lower_bound(n, c.D, c.m_max).value
                              : cayley::alon_boppana_lower_bound(n, channel.weights(), c.m_max).value;
      r.gap_ok = r.lambda2 >= r.alon_boppana_lb - 1e-9;
    } else {
      // No lower bound is proved for the non-hermitian case; record only that a gap exists.
      r.alon_boppana_lb = 0.0;
      r.gap_ok = r.lambda2 < 1.0 - 1e-9;
    }
    if (spectrum) {
      spectrum->clear();
      for (const Complex& z : s.eigenvalues) spectrum->push_back(z.real());
    }
  } catch (const std::exception& e) {
    r.error = e.what();
    r.gap_ok = false;
  }
  if (c.timing)
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace detail

/// Every (N, trial) pair, in that order. A failing run becomes an error row.
inline SweepResult run_sweep(const ExperimentConfig& c, bool keep_spectra = false) {
  validate(c);
  struct Job {
    int n;
    int trial;
  };
  std::vector<Job> jobs;
  for (int n : c.N_list)
    for (int t = 0; t < c.trials; ++t) jobs.push_back({n, t});
  SweepResult out;
  out.records.resize(jobs.size());
  if (keep_spectra) out.spectra.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++)
      out.records[i] = detail::run_one(c, jobs[i].n, jobs[i].trial, keep_spectra ? &out.spectra[i] : nullptr);
  };
  const int workers = std::min<int>(c.threads, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

inline constexpr const char* SWEEP_HEADER =
    "N,D,seed,construction,lambda2,lambda_H,lambda_nH,alon_boppana_lb,gap_ok,wall_ms";

inline void write_sweep_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << SWEEP_HEADER << '\n';
  for (const auto& r : records) {
    os << r.N << ',' << r.D << ',' << r.seed << ',' << r.construction << ',' << format_double(r.lambda2) << ','
       << format_double(r.lambda_H) << ',' << format_double(r.lambda_nH) << ',' << format_double(r.alon_boppana_lb)
       << ',' << (r.gap_ok ? "true" : "false") << ',' << format_double(std::round(r.wall_ms * 1000.0) / 1000.0)
       << '\n';
  }
}

//----------------------------------------------------------------------------
// Scaling collapse
//----------------------------------------------------------------------------

struct CollapseCurve {
  int N = 0;
  std::vector<double> eigenvalues;  // descending, N^2 entries
};

/// Curve value at normalized rank x, linear between points (a / N^2, eig_a).
inline double interpolate_curve(const CollapseCurve& c, double x) {
  const double n2 = double(c.N) * double(c.N);
  const auto& e = c.eigenvalues;
  const double pos = x * n2 - 1.0;  // zero-based fractional index
  if (pos <= 0.0) return e.front();
  if (pos >= double(e.size() - 1)) return e.back();
  const auto i = static_cast<std::size_t>(pos);
  const double t = pos - double(i);
  return (1.0 - t) * e[i] + t * e[i + 1];
}

/// Largest vertical gap between two curves, evaluated at each non-unit point of `a`.
inline double quantile_distance(const CollapseCurve& a, const CollapseCurve& b) {
  const double n2 = double(a.N) * double(a.N);
  double worst = 0.0;
  for (std::size_t i = 1; i < a.eigenvalues.size(); ++i)
    worst = std::max(worst, std::abs(a.eigenvalues[i] - interpolate_curve(b, double(i + 1) / n2)));
  return worst;
}

struct CollapseReport {
  std::vector<CollapseCurve> curves;
  int distance_from = 0;
  int distance_to = 0;
  double quantile_distance = 0.0;  // between the two largest N
  std::filesystem::path csv_path;
  std::filesystem::path svg_path;
};

namespace detail {

inline void write_collapse_svg(std::ostream& os, const std::vector<CollapseCurve>& curves) {
  constexpr double W = 640, H = 420, L = 60, R = 20, T = 20, B = 50;
  double lo = 1.0, hi = 1.0;
  for (const auto& c : curves) {
    lo = std::min(lo, c.eigenvalues.back());
    hi = std::max(hi, c.eigenvalues.front());
  }
  lo = std::floor(lo * 10.0) / 10.0;
  hi = std::ceil(hi * 10.0) / 10.0;
  if (hi <= lo) hi = lo + 1.0;
  auto px = [&](double x) { return L + x * (W - L - R); };
  auto py = [&](double y) { return T + (hi - y) / (hi - lo) * (H - T - B); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
     << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = k / 4.0;
    os << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << format_double(x)
       << "</text>\n";
    const double y = lo + (hi - lo) * k / 4.0;
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << format_double(y)
       << "</text>\n";
  }
  os << "<text x=\"" << px(0.5) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">a / N^2</text>\n";
  os << "<text x=\"16\" y=\"" << py((lo + hi) / 2) << "\" transform=\"rotate(-90 16 " << py((lo + hi) / 2)
     << ")\" text-anchor=\"middle\">eigenvalue</text>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const double n2 = double(c.N) * double(c.N);
    const std::size_t stride = std::max<std::size_t>(1, c.eigenvalues.size() / 800);
    os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[k % 6] << "\" points=\"";
    for (std::size_t i = 0; i < c.eigenvalues.size(); i += stride)
      os << format_double(std::round(px(double(i + 1) / n2) * 100) / 100) << ','
         << format_double(std::round(py(c.eigenvalues[i]) * 100) / 100) << ' ';
    os << format_double(px(1.0)) << ',' << format_double(std::round(py(c.eigenvalues.back()) * 100) / 100);
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 70 << "\" y=\"" << T + 18 + 16 * k << "\" fill=\"" << colors[k % 6] << "\">N = "
       << c.N << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace detail

/// Writes collapse.csv (N, a_over_N2, eig) and collapse.svg into `dir`.
inline CollapseReport emit_collapse(const std::filesystem::path& dir, std::vector<CollapseCurve> curves) {
  detail::require(curves.size() >= 2, "emit_collapse: need spectra for at least two values of N");
  for (auto& c : curves) {
    detail::require(c.eigenvalues.size() == static_cast<std::size_t>(c.N) * c.N,
                    "emit_collapse: curve for N = " + std::to_string(c.N) + " does not have N^2 points");
    std::sort(c.eigenvalues.begin(), c.eigenvalues.end(), std::greater<>());
  }
  std::sort(curves.begin(), curves.end(), [](const auto& a, const auto& b) { return a.N < b.N; });
  CollapseReport out;
  const auto& a = curves[curves.size() - 2];
  const auto& b = curves.back();
  out.distance_from = a.N;
  out.distance_to = b.N;
  out.quantile_distance = quantile_distance(a, b);

  std::filesystem::create_directories(dir);
  out.csv_path = dir / "collapse.csv";
  out.svg_path = dir / "collapse.svg";
  std::ofstream csv(out.csv_path);
  if (!csv) throw ValidationError("emit_collapse: cannot write " + out.csv_path.string());
  csv << "N,a_over_N2,eig\n";
  for (const auto& c : curves) {
    const double n2 = double(c.N) * double(c.N);
    for (std::size_t i = 0; i < c.eigenvalues.size(); ++i)
      csv << c.N << ',' << format_double(double(i + 1) / n2) << ',' << format_double(c.eigenvalues[i]) << '\n';
  }
  std::ofstream svg(out.svg_path);
  if (!svg) throw ValidationError("emit_collapse: cannot write " + out.svg_path.string());
  detail::write_collapse_svg(svg, curves);
  out.curves = std::move(curves);
  return out;
}

}  // namespace qexp
