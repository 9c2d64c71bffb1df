#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spotquart/config.hpp"
#include "spotquart/errors.hpp"
#include "spotquart/report.hpp"
#include "spotquart/tick_io.hpp"

namespace fs = std::filesystem;
using namespace spotquart;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::path p = fs::path(dir) / name;
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + p.string() + "'");
  return out;
}

// Fine-grid path CSV as emitted by `simulate`; row count must match the
// configured sampling grid.
SimulatedPath read_path_csv(const std::string& file, const SamplingSpec& sampling) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open path file '" + file + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("time,x,c", 0) != 0)
    throw DataError("path file: expected header 'time,x,c'");

  SimulatedPath path;
  path.horizon = sampling.horizon;
  path.n = sampling.n;
  path.substeps = sampling.substeps;
  const long points = sampling.fine_steps() + 1;
  path.times.resize(points);
  path.x.resize(points);
  path.c.resize(points);

  long row = 0;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (row >= points)
      throw DataError("path file: more rows than the configured grid (" +
                      std::to_string(points) + ")");
    double t, x, c;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &c) != 3)
      throw DataError("path file line " + std::to_string(line_no) + ": malformed row");
    path.times[row] = t;
    path.x[row] = x;
    path.c[row] = c;
    ++row;
  }
  if (row != points)
    throw DataError("path file: expected " + std::to_string(points) + " rows, got " +
                    std::to_string(row));
  return path;
}

int run(int argc, char** argv) {
  CLI::App app{"spotquart: spot-volatility quarticity estimators with a Monte Carlo "
               "verification harness"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_override = 0;
  int threads = 0;
  app.add_option("--config", config_path, "JSON configuration document")->required();
  app.add_option("--out", out_dir, "output directory (default .)");
  auto* seed_opt = app.add_option("--seed", seed_override, "override the config seed");
  app.add_option("--threads", threads, "advisory worker count (0 = hardware)");

  auto* cmd_simulate = app.add_subcommand("simulate", "emit one path CSV (time,x,c)");
  auto* cmd_estimate =
      app.add_subcommand("estimate", "run the configured estimators on a path or ticks");
  std::string ticks_file, path_file;
  double tick_delta = 0.0;
  bool log_flag = false;
  cmd_estimate->add_option("--ticks", ticks_file, "tick CSV (timestamp,price)");
  cmd_estimate->add_option("--delta", tick_delta, "resampling step for --ticks");
  cmd_estimate->add_flag("--log", log_flag, "estimate on log prices");
  cmd_estimate->add_option("--path", path_file, "path CSV emitted by `simulate`");
  auto* cmd_mc = app.add_subcommand("mc", "replicated experiment + report");
  std::string format = "table";
  cmd_mc->add_option("--format", format, "stdout format: table, csv, json-lines");
  auto* cmd_ci = app.add_subcommand("ci", "confidence-interval coverage experiment");
  double alpha_flag = -1.0;
  cmd_ci->add_option("--alpha", alpha_flag, "nominal level (default from config)");
  auto* cmd_decomp = app.add_subcommand("decomp", "I/II/III decomposition diagnostic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  RunConfig cfg = parse_config(read_file(config_path));
  if (seed_opt->count() > 0) cfg.mc.master_seed = seed_override;
  cfg.mc.threads = threads;

  if (cmd_simulate->parsed()) {
    const SimulatedPath path =
        simulate_path(cfg.mc.model, cfg.mc.sampling, cfg.mc.master_seed);
    auto out = open_output(out_dir, "path.csv");
    write_path_csv(path, out);
    std::cout << "wrote " << (fs::path(out_dir) / "path.csv").string() << " ("
              << path.times.size() << " points)\n";
    return 0;
  }

  if (cmd_estimate->parsed()) {
    Eigen::ArrayXd observations;
    Eigen::ArrayXd c_ref;
    bool have_c_ref = false;
    double delta_n = 0.0;

    if (!ticks_file.empty()) {
      if (!(tick_delta > 0.0))
        throw ConfigError("estimate --ticks requires --delta > 0");
      std::ifstream in(ticks_file);
      if (!in) throw DataError("cannot open ticks file '" + ticks_file + "'");
      const ObservationSeries series =
          ingest_ticks(in, tick_delta, log_flag || cfg.log_price);
      observations = series.values;
      delta_n = series.delta_n;
    } else if (!path_file.empty()) {
      const SimulatedPath path = read_path_csv(path_file, cfg.mc.sampling);
      observations = observe(path);
      delta_n = path.delta_n();
      c_ref = observed_spot_variance(path);
      have_c_ref = true;
    } else {
      const SimulatedPath path =
          simulate_path(cfg.mc.model, cfg.mc.sampling, cfg.mc.master_seed);
      observations = observe(path);
      delta_n = path.delta_n();
      c_ref = observed_spot_variance(path);
      have_c_ref = true;
    }

    const IncrementSeries inc = increments(observations, delta_n);
    const long n = inc.count();
    const int k_n = cfg.mc.kn_rule.window(n);
    std::vector<EstimateResult> results;
    for (const auto& spec : cfg.mc.estimators) {
      if (spec.kind == EstimatorKind::UStat && !have_c_ref) {
        std::cerr << "skipping " << spec.token()
                  << ": the u-statistic needs the true spot variance, which tick "
                     "data does not carry\n";
        continue;
      }
      if (spec.windowed() && k_n > n)
        throw ConfigError("estimate: window k_n = " + std::to_string(k_n) +
                          " exceeds N = " + std::to_string(n));
      if ((spec.kind == EstimatorKind::VHat || spec.kind == EstimatorKind::VHatPrime) &&
          k_n >= n)
        throw ConfigError("estimate: " + spec.token() + " requires k_n < N");
      const double value = evaluate_estimator(spec, inc, k_n, c_ref);
      if (!std::isfinite(value))
        throw NumericError("estimate: " + spec.token() + " produced a non-finite value");
      results.push_back({spec.token(), value, delta_n, k_n, n});
    }
    auto out = open_output(out_dir, "estimates.csv");
    write_estimates_csv(results, out);
    std::cout << "wrote " << (fs::path(out_dir) / "estimates.csv").string() << " ("
              << results.size() << " estimators, N = " << n << ", k_n = " << k_n
              << ")\n";
    return 0;
  }

  if (cmd_mc->parsed()) {
    const ReportFormat fmt = parse_report_format(format);
    const McReport report = run_experiment(cfg.mc);
    {
      auto out = open_output(out_dir, "mc_report.csv");
      write_mc_report_csv(report, out);
    }
    write_report(report, fmt, std::cout);
    if (cfg.emit.histogram || cfg.emit.qq) {
      for (const auto& s : report.samples) {
        if (cfg.emit.histogram) {
          auto out = open_output(out_dir, "z_hist_" + s.spec.token() + ".csv");
          write_histogram_csv(s.z, out);
        }
        if (cfg.emit.qq) {
          auto out = open_output(out_dir, "z_qq_" + s.spec.token() + ".csv");
          write_qq_csv(s.z, out);
        }
      }
    }
    if (cfg.emit.samples) {
      auto out = open_output(out_dir, "samples.csv");
      write_samples_csv(report, out);
    }
    if (report.decomposition) {
      auto terms = open_output(out_dir, "decomp_terms.csv");
      write_decomposition_csv(*report.decomposition, terms);
      auto cov = open_output(out_dir, "decomp_covariance.csv");
      write_decomposition_covariance_csv(*report.decomposition, cov);
    }
    return 0;
  }

  if (cmd_ci->parsed()) {
    const double alpha = alpha_flag >= 0.0 ? alpha_flag : cfg.alpha;
    const CiReport report = ci_experiment(cfg.mc, alpha);
    auto out = open_output(out_dir, "ci_report.csv");
    write_ci_csv(report, out);
    for (const auto& row : report.rows)
      std::cout << "coverage[" << row.plugin << "] = " << row.coverage
                << (row.clamped > 0 ? "  (clamped " + std::to_string(row.clamped) + ")"
                                    : "")
                << "\n";
    return 0;
  }

  if (cmd_decomp->parsed()) {
    cfg.mc.decomposition = true;
    const McReport report = run_experiment(cfg.mc);
    const auto& diag = *report.decomposition;
    {
      auto out = open_output(out_dir, "decomp_terms.csv");
      write_decomposition_csv(diag, out);
    }
    {
      auto out = open_output(out_dir, "decomp_covariance.csv");
      write_decomposition_covariance_csv(diag, out);
    }
    std::cout << "decomposition over " << report.replications
              << " replications (n = " << report.n << ", k_n = " << report.k_n << ")\n"
              << "var(I) = " << diag.covariance(0, 0)
              << "  var(II) = " << diag.covariance(1, 1)
              << "  var(III) = " << diag.covariance(2, 2) << "\n"
              << "var(I+II+III) = "
              << diag.covariance.sum()
              << "  max identity error = " << diag.max_identity_error << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
