#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "spotquart/config.hpp"
#include "spotquart/estimators.hpp"
#include "spotquart/simulate.hpp"

namespace fs = std::filesystem;
using namespace spotquart;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SPOTQUART_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("spotquart_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string kSmallConfig =
    R"({"model":{"type":"constant","c":1.0},"t":1.0,"n":512,"M":64,"seed":11})";

}  // namespace

TEST_CASE("exit codes follow the documented contract") {
  const fs::path dir = fresh_dir("codes");
  write_file(dir / "ok.json", kSmallConfig);
  write_file(dir / "bad_gamma.json",
             R"({"model":{"type":"constant","c":1.0},"t":1.0,"n":512,"M":4,"seed":1,
                 "kn":{"gamma":0.6}})");
  write_file(dir / "ticks_bad.csv", "timestamp,price\n0,100\n1,-3\n");

  CHECK(run_cli("simulate --config " + (dir / "ok.json").string() + " --out " +
                (dir / "o1").string()) == 0);
  CHECK(run_cli("mc --config " + (dir / "missing.json").string()) == 1);
  CHECK(run_cli("mc --config " + (dir / "bad_gamma.json").string()) == 1);
  CHECK(run_cli("estimate --config " + (dir / "ok.json").string() +
                " --ticks " + (dir / "nonexistent.csv").string() + " --delta 1") == 2);
  CHECK(run_cli("estimate --config " + (dir / "ok.json").string() + " --ticks " +
                (dir / "ticks_bad.csv").string() + " --delta 1 --out " +
                (dir / "o2").string()) == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("bogus-subcommand") == 1);
}

TEST_CASE("simulate then estimate reproduces the in-memory estimator values") {
  const fs::path dir = fresh_dir("roundtrip");
  write_file(dir / "cfg.json", kSmallConfig);

  REQUIRE(run_cli("simulate --config " + (dir / "cfg.json").string() + " --out " +
                  dir.string()) == 0);
  REQUIRE(run_cli("estimate --config " + (dir / "cfg.json").string() + " --path " +
                  (dir / "path.csv").string() + " --out " + (dir / "fromfile").string()) ==
          0);

  // In-memory reference with the identical configuration and seed.
  const RunConfig cfg = parse_config(kSmallConfig);
  const SimulatedPath path =
      simulate_path(cfg.mc.model, cfg.mc.sampling, cfg.mc.master_seed);
  const IncrementSeries inc = increments(observe(path), path.delta_n());
  const int k_n = cfg.mc.kn_rule.window(inc.count());
  const Eigen::ArrayXd c_ref = observed_spot_variance(path);

  std::ifstream est(dir / "fromfile" / "estimates.csv");
  REQUIRE(est.good());
  std::string line;
  std::getline(est, line);
  CHECK(line == "estimator,value,delta_n,k_n,n");
  int rows = 0;
  while (std::getline(est, line)) {
    if (line.empty()) continue;
    ++rows;
    const std::size_t comma = line.find(',');
    const std::string token = line.substr(0, comma);
    const double value = std::stod(line.substr(comma + 1));
    const double expected =
        evaluate_estimator(EstimatorSpec::parse(token), inc, k_n, c_ref);
    const double scale = std::max(std::abs(expected), 1e-30);
    CHECK(std::abs(value - expected) / scale <= 1e-10);
  }
  CHECK(rows == 12);
}

TEST_CASE("mc report is byte-identical across thread counts") {
  const fs::path dir = fresh_dir("threads");
  write_file(dir / "cfg.json",
             R"({"model":{"type":"constant","c":1.0},"t":1.0,"n":512,"M":96,"seed":3,
                 "coverage":true,"decomposition":true})");
  REQUIRE(run_cli("mc --config " + (dir / "cfg.json").string() + " --threads 1 --out " +
                  (dir / "t1").string()) == 0);
  REQUIRE(run_cli("mc --config " + (dir / "cfg.json").string() + " --threads 8 --out " +
                  (dir / "t8").string()) == 0);
  const std::string a = slurp(dir / "t1" / "mc_report.csv");
  const std::string b = slurp(dir / "t8" / "mc_report.csv");
  REQUIRE_FALSE(a.empty());
  CHECK(a == b);
  CHECK(slurp(dir / "t1" / "decomp_terms.csv") == slurp(dir / "t8" / "decomp_terms.csv"));
}

TEST_CASE("estimate ingests tick data") {
  const fs::path dir = fresh_dir("ticks");
  write_file(dir / "cfg.json",
             R"({"model":{"type":"constant","c":1.0},"t":1.0,"n":512,"M":4,"seed":1,
                 "estimators":["rv"]})");
  std::ostringstream ticks;
  ticks << "timestamp,price\n";
  for (int i = 0; i <= 400; ++i)
    ticks << 0.25 * i << ',' << 100.0 + 0.01 * ((i * 2654435761u) % 97) << "\n";
  write_file(dir / "ticks.csv", ticks.str());

  REQUIRE(run_cli("estimate --config " + (dir / "cfg.json").string() + " --ticks " +
                  (dir / "ticks.csv").string() + " --delta 0.5 --log --out " +
                  dir.string()) == 0);
  const std::string out = slurp(dir / "estimates.csv");
  CHECK(out.rfind("estimator,value,delta_n,k_n,n", 0) == 0);
  CHECK(out.find("rv,") != std::string::npos);
}

TEST_CASE("ci and decomp subcommands emit their tables") {
  const fs::path dir = fresh_dir("cidecomp");
  write_file(dir / "cfg.json",
             R"({"model":{"type":"constant","c":1.0},"t":1.0,"n":512,"M":64,"seed":5,
                 "estimators":["rv","vhat_prime"]})");
  REQUIRE(run_cli("ci --config " + (dir / "cfg.json").string() + " --alpha 0.05 --out " +
                  dir.string()) == 0);
  const std::string ci = slurp(dir / "ci_report.csv");
  CHECK(ci.rfind("plugin,alpha,n,k_n,M,coverage,clamped", 0) == 0);
  CHECK(ci.find("vhat_prime,") != std::string::npos);
  CHECK(ci.find("true_variance,") != std::string::npos);

  REQUIRE(run_cli("decomp --config " + (dir / "cfg.json").string() + " --out " +
                  dir.string()) == 0);
  CHECK(slurp(dir / "decomp_terms.csv").rfind("replication,term_I,term_II,term_III", 0) ==
        0);
  CHECK(slurp(dir / "decomp_covariance.csv").rfind("term,I,II,III", 0) == 0);
}

TEST_CASE("seed flag overrides the config seed") {
  const fs::path dir = fresh_dir("seed");
  write_file(dir / "cfg.json", kSmallConfig);
  REQUIRE(run_cli("simulate --config " + (dir / "cfg.json").string() + " --seed 99 --out " +
                  (dir / "a").string()) == 0);
  REQUIRE(run_cli("simulate --config " + (dir / "cfg.json").string() + " --seed 99 --out " +
                  (dir / "b").string()) == 0);
  REQUIRE(run_cli("simulate --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "c").string()) == 0);
  CHECK(slurp(dir / "a" / "path.csv") == slurp(dir / "b" / "path.csv"));
  CHECK(slurp(dir / "a" / "path.csv") != slurp(dir / "c" / "path.csv"));
}
