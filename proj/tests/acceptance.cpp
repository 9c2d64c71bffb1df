// Acceptance suite: runs the pinned experiments end to end and prints one
// PASS/FAIL line per criterion. Exit code 0 only if every criterion holds.
//
// usage: acceptance [path-to-cli] [--stretch]
//   path-to-cli  the spotquart binary, needed by the determinism criterion
//   --stretch    also run the M=200000 variance-constant adjudication
//                (informational, never gates)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracle_ref.hpp"
#include "spotquart/config.hpp"
#include "spotquart/mc.hpp"
#include "spotquart/report.hpp"
#include "spotquart/rng.hpp"

namespace fs = std::filesystem;
using namespace spotquart;

namespace {

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Outcome> results;

void record(int id, const std::string& name, bool pass, const std::string& detail) {
  results.push_back({id, name, pass, detail});
  std::printf("[%2d] %s  %-28s %s\n", id, pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

const McReportRow& row_of(const McReport& report, const std::string& token) {
  for (const auto& row : report.rows)
    if (row.estimator == token) return row;
  throw std::runtime_error("estimator row missing: " + token);
}

const EstimatorSamples& samples_of(const McReport& report, const std::string& token) {
  for (const auto& s : report.samples)
    if (s.spec.token() == token) return s;
  throw std::runtime_error("estimator samples missing: " + token);
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

// ---------------------------------------------------------------------------

void criterion_1_oracle_equivalence() {
  GaussianSampler gauss(271828);
  auto& engine = gauss.engine();
  double max_rel = 0.0;
  // relative to the magnitude of the defining sum: equal to plain relative
  // error for the all-positive sums, and the conditioning-aware measure for
  // the cancelling ones (e.g. g = x^3 with k_n = 6 cancels exactly).
  auto rel = [](double a, double b, double scale = 0.0) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), scale, 1e-30});
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + static_cast<int>(18 * engine.uniform01());
    const int k = 2 + static_cast<int>((n - 2) * engine.uniform01());
    IncrementSeries inc;
    inc.delta_n = 0.01 + engine.uniform01();
    inc.values.resize(n);
    for (int i = 0; i < n; ++i) inc.values[i] = 0.5 * gauss();
    Eigen::ArrayXd cref(n);
    for (int i = 0; i < n; ++i) cref[i] = 0.1 + engine.uniform01();
    const std::vector<double> d(inc.values.data(), inc.values.data() + n);
    const std::vector<double> cv(cref.data(), cref.data() + n);

    max_rel = std::max(max_rel, rel(realized_volatility(inc), oracle::rv(d)));
    max_rel = std::max(max_rel, rel(quarticity_naive(inc), oracle::naive(d, inc.delta_n)));
    max_rel = std::max(max_rel, rel(vbar(inc, k), oracle::vbar(d, inc.delta_n, k)));
    max_rel = std::max(max_rel,
                       rel(vbar_prime(inc, k), oracle::vbar_prime(d, inc.delta_n, k)));
    if (k < n) {
      const double vs = oracle::vhat_scale(d, inc.delta_n, k);
      max_rel = std::max(max_rel, rel(vhat(inc, k), oracle::vhat(d, inc.delta_n, k), vs));
      max_rel = std::max(
          max_rel, rel(vhat_prime(inc, k), oracle::vhat_prime(d, inc.delta_n, k), vs));
    }
    for (const char* gname : {"x", "x2", "2x2", "x3"}) {
      const auto& g = g_function(gname);
      max_rel = std::max(
          max_rel, rel(general_g(inc, k, g.g, g.g2),
                       oracle::general_g(d, inc.delta_n, k, g.g, g.g2),
                       oracle::general_g_scale(d, inc.delta_n, k, g.g, g.g2)));
    }
    for (const char* wname : {"c", "2c"}) {
      const auto& w = weight_function(wname);
      max_rel = std::max(max_rel, rel(u_statistic(inc, cref, w.w),
                                      oracle::ustat(d, inc.delta_n, cv, w.w),
                                      oracle::ustat_scale(d, inc.delta_n, cv, w.w)));
    }
    const SpotVolSeries s = spot_vol(inc, k);
    const std::vector<double> so = oracle::spot(d, inc.delta_n, k);
    for (std::size_t i = 0; i < so.size(); ++i)
      max_rel = std::max(max_rel, rel(s.values[i], so[i]));
  }
  record(1, "oracle equivalence", max_rel <= 1e-12,
         "1000 random inputs (N <= 20), max rel err " + fmt(max_rel, "%.3g") +
             " (limit 1e-12)");
}

McConfig default_config() {
  McConfig cfg;
  cfg.model.vol = VolatilitySpec::constant(1.0);
  cfg.sampling = SamplingSpec{1.0, 10'000, 1};
  cfg.replications = 10'000;
  cfg.master_seed = 20260810;
  cfg.estimators = EstimatorSpec::default_set();
  cfg.coverage = true;
  cfg.alpha = 0.05;
  cfg.decomposition = true;
  return cfg;
}

void criteria_on_default_run(const McReport& rep) {
  const auto& rv = row_of(rep, "rv");
  const auto& naive = row_of(rep, "quartic_naive");
  const auto& vbarp = row_of(rep, "vbar_prime");
  const auto& vhat_row = row_of(rep, "vhat");
  const auto& vhatp = row_of(rep, "vhat_prime");
  const auto& gx = row_of(rep, "general_g_x");
  const auto& gx3 = row_of(rep, "general_g_x3");
  const auto& uc = row_of(rep, "ustat_c");
  const auto& u2c = row_of(rep, "ustat_2c");

  record(2, "realized volatility CLT",
         in_band(rv.var_e, 1.85, 2.15) && std::abs(rv.mean_e) < 0.05,
         "var(e) = " + fmt(rv.var_e) + " in [1.85, 2.15]; |mean(e)| = " +
             fmt(std::abs(rv.mean_e)) + " < 0.05");

  record(3, "naive quarticity variance", in_band(naive.var_e, 39.5, 46.0),
         "var(e) = " + fmt(naive.var_e) + " in [39.5, 46.0] (target 128/3 = 42.67)");

  const bool ordering =
      vbarp.var_e < naive.var_e && naive.var_e < vhatp.var_e;
  record(4, "optimal estimator", in_band(vbarp.var_e, 29.5, 34.5) && ordering,
         "var(e) vbar_prime = " + fmt(vbarp.var_e) +
             " in [29.5, 34.5]; ordering vbar_prime < naive < vhat_prime " +
             (ordering ? "holds" : "BROKEN") + " (" + fmt(vbarp.var_e) + " < " +
             fmt(naive.var_e) + " < " + fmt(vhatp.var_e) + ")");

  record(5, "theorem-1 adjudication", in_band(vhatp.var_e, 50.0, 61.0),
         "var(e) vhat_prime = " + fmt(vhatp.var_e) +
             " in [50, 61]; constants printed: paper (sqrt(105)-sqrt(8))^2 = " +
             fmt(vhatp.kappa_paper, "%.6g") + ", derived = " +
             fmt(vhatp.kappa_derived, "%.6g"));

  const bool bias_vhat = vhat_row.mean_e > 3.0;
  const bool bias_vhatp = std::abs(vhatp.mean_e) < 0.5;
  record(6, "bias correction", bias_vhat && bias_vhatp,
         "mean(e) vhat = " + fmt(vhat_row.mean_e) + " (needs > 3: " +
             (bias_vhat ? "ok" : "violated") + "); |mean(e)| vhat_prime = " +
             fmt(std::abs(vhatp.mean_e)) + " (needs < 0.5: " +
             (bias_vhatp ? "ok" : "violated") + ")");
  if (!bias_vhatp) {
    const double k_n = rep.k_n;
    const double predicted =
        -(2.0 * k_n * std::sqrt(rep.delta_n) +
          4.0 / (k_n * k_n * std::sqrt(rep.delta_n)));
    std::printf("      analysis: the vhat_prime sum covers ~t - k_n*delta_n of time, an\n"
                "      O(k_n*sqrt(delta_n)) edge bias the CLT rate condition only kills\n"
                "      asymptotically; predicted mean(e) = -(2*k_n*sqrt(dn) + 4t/(k_n^2*\n"
                "      sqrt(dn))) = %s, measured %s.\n",
                fmt(predicted).c_str(), fmt(vhatp.mean_e).c_str());
  }

  record(7, "lemma-1 general g",
         in_band(gx3.var_e, 16.5, 19.5) && in_band(gx.var_e, 1.85, 2.15),
         "var(e) g=x^3: " + fmt(gx3.var_e) + " in [16.5, 19.5] (target 18); g=x: " +
             fmt(gx.var_e) + " in [1.85, 2.15]");

  record(8, "lemma-2 u-statistic",
         in_band(uc.var_e, 1.85, 2.15) && in_band(u2c.var_e, 7.4, 8.6),
         "var(U) w=c: " + fmt(uc.var_e) + " in [1.85, 2.15]; w=2c: " + fmt(u2c.var_e) +
             " in [7.4, 8.6]; weight 2c matches the printed lemma's x^2 limit "
             "(8*int c^4), the printed weight c gives 2*int c^4");

  const auto& diag = *rep.decomposition;
  const double var_i = diag.covariance(0, 0);
  const double var_sum = diag.covariance.sum();
  const double vhatp_var = vhatp.var_e;
  const bool identity_ok = diag.max_identity_error <= 1e-8;
  const bool var_i_ok = in_band(var_i, 91.0, 101.0);
  const bool sum_ok =
      in_band(var_sum, 50.0, 61.0) &&
      std::abs(var_sum - vhatp_var) <= 1e-6 * std::max(var_sum, vhatp_var);
  record(9, "decomposition diagnostic", identity_ok && var_i_ok && sum_ok,
         "identity max rel err " + fmt(diag.max_identity_error, "%.3g") +
             " (limit 1e-8); var(I) = " + fmt(var_i) +
             " in [91, 101] (derived 96, not 105); var(I+II+III) = " + fmt(var_sum) +
             " vs var(e) vhat_prime = " + fmt(vhatp_var));

  const bool cov_ok = vhatp.has_coverage && in_band(vhatp.coverage, 0.935, 0.962);
  record(12, "ci coverage",
         cov_ok,
         "95% CI with vhat_prime plug-in covers " + fmt(vhatp.coverage, "%.4f") +
             " in [0.935, 0.962]; oracle (true 2*int c^2) covers " +
             fmt(rep.oracle_coverage, "%.4f") + "; clamped " +
             std::to_string(vhatp.ci_clamped));
}

void criterion_10_rate() {
  auto rmse = [](long n, std::uint64_t seed) {
    McConfig cfg;
    cfg.model.vol = VolatilitySpec::constant(1.0);
    cfg.sampling = SamplingSpec{1.0, n, 1};
    cfg.replications = 4000;
    cfg.master_seed = seed;
    cfg.estimators = {EstimatorSpec::parse("vhat_prime")};
    const McReport rep = run_experiment(cfg);
    const auto& s = samples_of(rep, "vhat_prime");
    const double mean_sq = compensated_sum(s.error.square()) / s.error.size();
    return std::sqrt(mean_sq * rep.delta_n);  // raw-scale RMSE
  };
  const double coarse = rmse(1L << 12, 919191);
  const double fine = rmse(1L << 14, 929292);
  const double ratio = fine / coarse;
  record(10, "rate check", in_band(ratio, 1.0 / 2.3, 1.0 / 1.7),
         "RMSE(n=2^14)/RMSE(n=2^12) = " + fmt(ratio) + " in [1/2.3, 1/1.7] = [" +
             fmt(1.0 / 2.3) + ", " + fmt(1.0 / 1.7) + "]");
}

void criterion_11_heston() {
  McConfig cfg;
  cfg.model.vol = VolatilitySpec::heston(3.0, 1.0, 0.5, -0.5, 1.0);
  cfg.sampling = SamplingSpec{1.0, 10'000, 10};
  cfg.replications = 10'000;
  cfg.master_seed = 31337;
  cfg.estimators = {EstimatorSpec::parse("vbar_prime")};
  const McReport rep = run_experiment(cfg);
  const auto& s = samples_of(rep, "vbar_prime");
  const Moments mz = moments(s.z);
  const double ks = row_of(rep, "vbar_prime").ks;
  const bool var_ok = in_band(mz.variance, 0.9, 1.1);
  const bool kurt_ok = std::abs(mz.ex_kurtosis) < 0.3;
  const bool ks_ok = ks < 0.025;
  record(11, "stable convergence (heston)", var_ok && kurt_ok && ks_ok,
         "z = e/sqrt(32*int c^4 path): var(z) = " + fmt(mz.variance) +
             " in [0.9, 1.1] (" + (var_ok ? "ok" : "violated") +
             "); |ex kurt| = " + fmt(std::abs(mz.ex_kurtosis)) + " < 0.3 (" +
             (kurt_ok ? "ok" : "violated") + "); KS = " + fmt(ks) + " < 0.025 (" +
             (ks_ok ? "ok" : "violated") + ")");
  if (!ks_ok) {
    std::printf("      analysis: the same O(k_n*sqrt(delta_n)) edge bias shifts z by\n"
                "      mean(z) = %s, which alone puts KS near |mean|*phi(0) = %s;\n"
                "      the var/kurtosis screens pass, so the shape is normal and only\n"
                "      the location is off at this n.\n",
                fmt(mz.mean).c_str(), fmt(std::abs(mz.mean) * 0.3989).c_str());
  }
}

void criterion_13_determinism(const std::string& cli) {
  if (cli.empty()) {
    record(13, "thread determinism", false, "no CLI binary path supplied");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "spotquart_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"model":{"type":"constant","c":1.0},"t":1.0,"n":1000,"M":200,"seed":77,)"
        << R"("coverage":true,"decomposition":true})";
  }
  auto run = [&](int threads, const std::string& sub) {
    const std::string cmd = cli + " mc --config " + (dir / "cfg.json").string() +
                            " --threads " + std::to_string(threads) + " --out " +
                            (dir / sub).string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const bool ok1 = run(1, "t1");
  const bool ok8 = run(8, "t8");
  const std::string a = slurp(dir / "t1" / "mc_report.csv");
  const std::string b = slurp(dir / "t8" / "mc_report.csv");
  const bool pass = ok1 && ok8 && !a.empty() && a == b;
  record(13, "thread determinism", pass,
         pass ? "mc report CSVs byte-identical for --threads 1 and --threads 8"
              : "mc report CSVs differ or the CLI failed");
}

void stretch_adjudication() {
  std::printf("stretch: M = 200000 adjudication of the vhat_prime constant...\n");
  McConfig cfg = default_config();
  cfg.coverage = false;
  cfg.decomposition = false;
  cfg.replications = 200'000;
  cfg.master_seed = 606060;
  cfg.estimators = {EstimatorSpec::parse("vhat_prime")};
  const McReport rep = run_experiment(cfg);
  const auto& s = samples_of(rep, "vhat_prime");
  const Moments me = moments(s.error);
  // standard error of the sample variance via the fourth central moment
  CompensatedSum m4;
  for (Eigen::Index i = 0; i < s.error.size(); ++i) {
    const double d = s.error[i] - me.mean;
    m4.add(d * d * d * d);
  }
  const double mu4 = m4.value() / s.error.size();
  const double se =
      std::sqrt((mu4 - me.variance * me.variance) / static_cast<double>(cfg.replications));
  const double lo = me.variance - 3.0 * se;
  const double hi = me.variance + 3.0 * se;
  const double paper = theoretical_variance_constant(s.spec).paper;
  auto verdict = [&](double v) { return v < lo || v > hi ? "excluded" : "compatible"; };
  std::printf("stretch: var(e) = %.4f, 3-sigma interval [%.4f, %.4f]; paper %.4f -> %s,"
              " derived 56 -> %s\n",
              me.variance, lo, hi, paper, verdict(paper), verdict(56.0));
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  bool stretch = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--stretch")
      stretch = true;
    else
      cli = arg;
  }

  std::printf("spotquart acceptance suite\n");
  std::printf("default experiment: constant c=1, t=1, n=10000, k_n=40, M=10000, s=1\n\n");

  criterion_1_oracle_equivalence();

  const McConfig cfg = default_config();
  const McReport rep = run_experiment(cfg);
  criteria_on_default_run(rep);
  criterion_10_rate();
  criterion_11_heston();
  criterion_13_determinism(cli);

  std::sort(results.begin(), results.end(),
            [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  int passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::printf("\nresult: %d/%zu criteria passed\n", passed, results.size());
  for (const auto& r : results)
    if (!r.pass) std::printf("  failed: [%d] %s\n", r.id, r.name.c_str());

  std::printf("\nfull report of the default experiment:\n");
  std::ostringstream table;
  write_mc_report_table(rep, table);
  std::fputs(table.str().c_str(), stdout);

  if (stretch) stretch_adjudication();

  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
