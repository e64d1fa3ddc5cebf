// qexp: command line front end for the quantum expander toolkit.
//
// Exit status: 0 on success, 2 on invalid input, 3 on numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qexp/qexp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int EXIT_VALIDATION = 2;
constexpr int EXIT_NUMERICAL = 3;

// Options shared by every subcommand. Flags given on the command line win over
// values read from --config.
struct Common {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* app, const std::string& out_help) {
    seed_opt = app->add_option("--seed", seed, "master seed");
    app->add_option("--out", out, out_help);
    app->add_option("--config", config_path, "key=value config file");
  }

  qexp::ExperimentConfig config() const {
    qexp::ExperimentConfig c;
    if (!config_path.empty()) c = qexp::load_config(config_path);
    if (seed_opt->count()) c.master_seed = seed;
    if (!out.empty()) c.output_dir = out;
    return c;
  }
};

// Writes to --out if given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    file_.open(path);
    if (!file_) throw qexp::ValidationError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

json spectrum_summary(const qexp::Channel& channel, const qexp::SuperopSpectrum& s) {
  const auto b = qexp::benchmark_values(static_cast<int>(channel.kraus_count()));
  json j{{"N", channel.dim()},
         {"D", channel.kraus_count()},
         {"hermitian", channel.hermitian()},
         {"lambda2", s.lambda2},
         {"lambda_H", b.lambda_H},
         {"lambda_nH", b.lambda_nH},
         {"unit_eigvec_residual", s.unit_eigvec_residual}};
  if (channel.seed()) j["seed"] = *channel.seed();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random quantum expanders: spectra, bounds and Schwinger-Dyson expectations"};
  app.require_subcommand(1);

  // spectrum --------------------------------------------------------------
  Common spec_common;
  int spec_n = 20, spec_d = 4;
  std::string spec_construction = "hermitian", spec_channel_in, spec_channel_out;
  auto* spec = app.add_subcommand("spectrum", "superoperator spectrum of one channel as CSV");
  spec_common.attach(spec, "CSV output file (default stdout)");
  auto* spec_n_opt = spec->add_option("--n", spec_n, "matrix dimension N");
  auto* spec_d_opt = spec->add_option("--d", spec_d, "Kraus count D");
  auto* spec_c_opt = spec->add_option("--construction", spec_construction, "hermitian | nonhermitian | weighted");
  spec->add_option("--channel", spec_channel_in, "read the channel from a JSON file instead of sampling");
  spec->add_option("--save-channel", spec_channel_out, "write the sampled channel as JSON");

  // sweep -----------------------------------------------------------------
  Common sweep_common;
  std::string sweep_construction, sweep_nlist;
  int sweep_d = 0, sweep_trials = 0, sweep_mmax = 0, sweep_threads = 0;
  bool sweep_no_timing = false;
  auto* sweep = app.add_subcommand("sweep", "lambda2 and bounds over a grid of N and trials");
  sweep_common.attach(sweep, "output directory for sweep.csv");
  sweep->add_option("--construction", sweep_construction, "hermitian | nonhermitian | weighted");
  sweep->add_option("--n-list", sweep_nlist, "comma separated N values");
  sweep->add_option("--d", sweep_d, "Kraus count D");
  sweep->add_option("--trials", sweep_trials, "trials per N");
  sweep->add_option("--m-max", sweep_mmax, "walk length for the lower bound");
  sweep->add_option("--threads", sweep_threads, "worker threads");
  sweep->add_flag("--no-timing", sweep_no_timing, "write wall_ms = 0");

  // collapse --------------------------------------------------------------
  Common col_common;
  std::string col_nlist;
  int col_d = 0, col_threads = 0;
  auto* col = app.add_subcommand("collapse", "sorted spectra against a/N^2 for several N");
  col_common.attach(col, "output directory for collapse.csv and collapse.svg");
  col->add_option("--n-list", col_nlist, "comma separated N values (default 20,30,50)");
  col->add_option("--d", col_d, "Kraus count D");
  col->add_option("--threads", col_threads, "worker threads");

  // moments ---------------------------------------------------------------
  Common mom_common;
  int mom_n = 20, mom_d = 4, mom_m = 6;
  std::string mom_construction = "hermitian";
  auto* mom = app.add_subcommand("moments", "Frobenius moments and trace moments of one channel");
  mom_common.attach(mom, "JSON output file (default stdout)");
  mom->add_option("--n", mom_n, "matrix dimension N");
  mom->add_option("--d", mom_d, "Kraus count D");
  mom->add_option("--m", mom_m, "largest power");
  mom->add_option("--construction", mom_construction, "hermitian | nonhermitian | weighted");

  // cayley ----------------------------------------------------------------
  Common cay_common;
  int cay_d = 4, cay_mmax = 20, cay_n = 0;
  auto* cay = app.add_subcommand("cayley", "walk counts on the D-regular tree and the lower bound");
  cay_common.attach(cay, "CSV output file for walk counts (default stdout)");
  cay->add_option("--d", cay_d, "Kraus count D");
  cay->add_option("--m-max", cay_mmax, "longest walk");
  cay->add_option("--n", cay_n, "if given, print the lower bound for this N as JSON on stderr");

  // sd eval ---------------------------------------------------------------
  Common sd_common;
  auto* sd = app.add_subcommand("sd", "Haar expectations of products of traces");
  sd->require_subcommand(1);
  auto* sd_eval = sd->add_subcommand("eval", "evaluate an expression such as \"tr(U1 U1) tr(U1' U1')\"");
  sd_common.attach(sd_eval, "JSON output file (default stdout)");
  std::string sd_expr;
  long sd_n = 16;
  bool sd_exact = false, sd_series = false, sd_mc = false, sd_allow_divergent = false;
  int sd_levels = 12;
  double sd_tol = 1e-10;
  std::size_t sd_samples = 10000;
  sd_eval->add_option("expr", sd_expr, "trace expression")->required();
  sd_eval->add_option("--n", sd_n, "matrix dimension N");
  auto* ex_opt = sd_eval->add_flag("--exact", sd_exact, "exact rational function in N");
  auto* se_opt = sd_eval->add_flag("--series", sd_series, "level-wise series");
  auto* mc_opt = sd_eval->add_flag("--mc", sd_mc, "Monte Carlo estimate");
  ex_opt->excludes(se_opt)->excludes(mc_opt);
  se_opt->excludes(mc_opt);
  sd_eval->add_option("--levels", sd_levels, "series depth");
  sd_eval->add_option("--tol", sd_tol, "series truncation tolerance");
  sd_eval->add_option("--samples", sd_samples, "Monte Carlo samples");
  sd_eval->add_flag("--allow-divergent", sd_allow_divergent, "series: permit m_total > N");

  // edge ------------------------------------------------------------------
  Common edge_common;
  int edge_n = 20, edge_d = 4, edge_projectors = 100;
  auto* edge = app.add_subcommand("edge", "edge-expansion checks on one hermitian channel");
  edge_common.attach(edge, "JSON output file (default stdout)");
  edge->add_option("--n", edge_n, "matrix dimension N");
  edge->add_option("--d", edge_d, "Kraus count D");
  edge->add_option("--projectors", edge_projectors, "random projectors to test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return EXIT_VALIDATION;
  }

  try {
    if (*spec) {
      auto c = spec_common.config();
      if (!spec_n_opt->count() && !spec_common.config_path.empty()) spec_n = c.N_list.front();
      if (!spec_d_opt->count() && !spec_common.config_path.empty()) spec_d = c.D;
      if (!spec_c_opt->count() && !spec_common.config_path.empty()) spec_construction = c.construction;
      std::optional<qexp::Channel> channel;
      if (!spec_channel_in.empty()) {
        std::ifstream in(spec_channel_in);
        if (!in) throw qexp::ValidationError("cannot open channel file '" + spec_channel_in + "'");
        channel = qexp::read_channel(in);
      } else {
        channel = qexp::build_for(spec_construction, spec_n, spec_d, c.master_seed);
      }
      if (!spec_channel_out.empty()) {
        std::ofstream out(spec_channel_out);
        qexp::write_channel(out, *channel);
      }
      const auto s = qexp::eigen_spectrum(*channel);
      Sink sink(spec_common.out);
      qexp::write_spectrum_csv(sink.stream(), s);
      std::cerr << spectrum_summary(*channel, s).dump() << '\n';
    } else if (*sweep) {
      auto c = sweep_common.config();
      if (!sweep_construction.empty()) c.construction = sweep_construction;
      if (!sweep_nlist.empty()) qexp::set_config_value(c, "N_list", sweep_nlist);
      if (sweep_d) c.D = sweep_d;
      if (sweep_trials) c.trials = sweep_trials;
      if (sweep_mmax) c.m_max = sweep_mmax;
      if (sweep_threads) c.threads = sweep_threads;
      if (sweep_no_timing) c.timing = false;
      const auto result = qexp::run_sweep(c);
      fs::create_directories(c.output_dir);
      const fs::path path = fs::path(c.output_dir) / "sweep.csv";
      std::ofstream csv(path);
      if (!csv) throw qexp::ValidationError("cannot write " + path.string());
      qexp::write_sweep_csv(csv, result.records);
      int errors = 0;
      for (const auto& r : result.records)
        if (r.failed()) {
          ++errors;
          std::cerr << "error: N=" << r.N << " seed=" << r.seed << ": " << r.error << '\n';
        }
      std::cerr << "wrote " << path.string() << " (" << result.records.size() << " rows, " << errors
                << " errors)\n";
    } else if (*col) {
      auto c = col_common.config();
      c.construction = "hermitian";
      c.trials = 1;
      if (!col_nlist.empty()) qexp::set_config_value(c, "N_list", col_nlist);
      if (col_d) c.D = col_d;
      if (col_threads) c.threads = col_threads;
      const auto result = qexp::run_sweep(c, true);
      std::vector<qexp::CollapseCurve> curves;
      for (std::size_t i = 0; i < result.records.size(); ++i) {
        if (result.records[i].failed()) throw qexp::NumericalError(result.records[i].error);
        curves.push_back({result.records[i].N, result.spectra[i]});
      }
      const auto report = qexp::emit_collapse(c.output_dir, std::move(curves));
      json j{{"csv", report.csv_path.string()},
             {"svg", report.svg_path.string()},
             {"quantile_distance", report.quantile_distance},
             {"between", {report.distance_from, report.distance_to}}};
      for (const auto& r : result.records) j["lambda2"][std::to_string(r.N)] = r.lambda2;
      print_json(j);
    } else if (*mom) {
      auto c = mom_common.config();
      const auto channel = qexp::build_for(mom_construction, mom_n, mom_d, c.master_seed);
      const auto fro = qexp::frobenius_moments(channel, mom_m);
      json j{{"N", mom_n}, {"D", mom_d}, {"seed", c.master_seed}, {"construction", mom_construction}};
      for (int m = 1; m <= mom_m; ++m) {
        json row{{"m", m},
                 {"frobenius", fro[m - 1]},
                 {"lower_bound", double(mom_n) * mom_n * std::pow(double(mom_d), -m)}};
        if (channel.hermitian() && m % 2 == 0) {
          row["trace_moment"] = qexp::moment_trace(channel, m);
          try {
            const auto est = qexp::estimate_lambda2_from_moments(channel, m);
            row["lambda2_estimate"] = est.value;
          } catch (const qexp::NumericalError&) {
            row["lambda2_estimate"] = nullptr;
          }
        }
        j["moments"].push_back(row);
      }
      Sink sink(mom_common.out);
      sink.stream() << j.dump(2) << '\n';
    } else if (*cay) {
      const auto table = qexp::cayley::walk_counts(cay_d, cay_mmax);
      Sink sink(cay_common.out);
      qexp::cayley::write_walk_csv(sink.stream(), table);
      if (cay_n > 0) {
        const auto lb = qexp::cayley::alon_boppana_lower_bound(cay_n, cay_d, cay_mmax);
        std::cerr << json{{"N", cay_n}, {"D", cay_d}, {"lower_bound", lb.value}, {"best_m", lb.best_m}}.dump()
                  << '\n';
      }
    } else if (*sd) {
      const auto parsed = qexp::sd::parse_trace_expr(sd_expr);
      json j{{"expr", sd_expr}, {"canonical", qexp::sd::to_string(parsed.query)},
             {"trivial_traces", parsed.trivial_traces}, {"N", sd_n}};
      const double scale = std::pow(double(sd_n), parsed.trivial_traces);
      if (sd_series) {
        qexp::sd::SeriesOptions opts;
        opts.allow_divergent = sd_allow_divergent;
        const auto r = qexp::sd::evaluate_series(parsed.query, sd_n, sd_levels, sd_tol, opts);
        j["method"] = "series";
        j["value"] = scale * r.partial_total;
        j["truncation_bound"] = scale * r.truncation_bound;
        j["levels_computed"] = r.levels_computed;
        j["exhausted"] = r.exhausted;
        for (const auto& s : r.level_sums) j["level_sums"].push_back(s.str());
      } else if (sd_mc) {
        const qexp::SeededRng rng(sd_common.seed);
        const auto r = qexp::sd::monte_carlo_expectation(parsed.query, sd_n, sd_samples, rng);
        j["method"] = "monte_carlo";
        j["value"] = scale * r.estimate;
        j["stderr"] = scale * r.stderr_;
        j["imag_mean"] = scale * r.imag_mean;
        j["samples"] = r.samples;
        j["seed"] = sd_common.seed;
      } else {
        (void)sd_exact;  // exact is the default
        const auto r = qexp::sd::evaluate_exact(parsed.query) * qexp::sd::RationalInN::power_of_N(parsed.trivial_traces);
        j["method"] = "exact";
        j["rational"] = r.to_string();
        j["value"] = r(double(sd_n));
      }
      Sink sink(sd_common.out);
      sink.stream() << j.dump(2) << '\n';
    } else if (*edge) {
      auto c = edge_common.config();
      qexp::detail::require(edge_projectors >= 1, "edge: --projectors must be >= 1");
      const auto channel = qexp::build_for("hermitian", edge_n, edge_d, c.master_seed);
      const double lambda2 = qexp::eigen_spectrum(channel).lambda2;
      qexp::SeededRng rng = qexp::SeededRng(c.master_seed).split(1);
      double min_slack = INFINITY;
      for (int k = 0; k < edge_projectors; ++k) {
        const auto l = static_cast<Eigen::Index>(1 + rng.next_u64() % static_cast<std::uint64_t>(edge_n / 2));
        const auto p = qexp::random_projector(edge_n, l, rng);
        min_slack = std::min(min_slack, qexp::converse_check(channel, p, lambda2).slack);
      }
      json chain_json;
      try {
        const auto chain = qexp::tanner_chain_check(channel);
        chain_json = {{"lhs", chain.lhs}, {"rhs", chain.rhs}, {"holds", chain.holds},
                      {"lambda2_signed", chain.lambda2}, {"trace_residual", chain.trace_residual}};
      } catch (const qexp::ValidationError&) {
        const auto chain = qexp::tanner_chain_check(qexp::square(channel));
        chain_json = {{"lhs", chain.lhs}, {"rhs", chain.rhs}, {"holds", chain.holds},
                      {"lambda2_signed", chain.lambda2}, {"trace_residual", chain.trace_residual},
                      {"squared", true}};
      }
      json j{{"N", edge_n}, {"D", edge_d}, {"seed", c.master_seed}, {"lambda2", lambda2},
             {"min_slack", min_slack}, {"chain", chain_json}};
      Sink sink(edge_common.out);
      sink.stream() << j.dump(2) << '\n';
    }
  } catch (const qexp::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_VALIDATION;
  } catch (const qexp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return EXIT_NUMERICAL;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_VALIDATION;
  }
  return 0;
}
