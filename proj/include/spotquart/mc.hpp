#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spotquart/estimators.hpp"
#include "spotquart/simulate.hpp"
#include "spotquart/stats.hpp"

namespace spotquart {

// Window rule k_n = max(2, round(theta * n^gamma)). The exponent must sit in
// (1/3, 1/2): k_n^2 delta_n -> 0 and k_n^3 delta_n -> infinity along n.
struct KnRule {
  double theta = 1.0;
  double gamma = 0.4;

  void validate() const;
  int window(long n) const;
};

struct McConfig {
  ModelSpec model;
  SamplingSpec sampling;
  KnRule kn_rule;
  std::vector<EstimatorSpec> estimators;
  long replications = 1;
  std::uint64_t master_seed = 0;
  int threads = 0;    // advisory; <= 0 uses hardware concurrency
  bool coverage = false;
  double alpha = 0.05;
  bool decomposition = false;

  void validate() const;
};

// Asymptotic-variance constant kappa such that the claimed variance of the
// CLT-scale error is kappa * int c^4 ds (kappa * int c^2 ds for rv and
// general_g_x). Two versions are tracked; they differ where the claims do:
//   vhat/vhat_prime: paper (sqrt(105)-sqrt(8))^2 ~ 55.0345 vs derived 56
//   ustat_c:         paper 8 (the x^2-limit claim)  vs derived 2
struct VarianceConstant {
  double paper = 0.0;
  double derived = 0.0;
};

VarianceConstant theoretical_variance_constant(const EstimatorSpec& spec);

// Path-specific asymptotic variance of the CLT-scale error, integrated over
// the simulated spot-variance path (derived constants).
double asymptotic_variance_functional(const EstimatorSpec& spec,
                                      const SimulatedPath& path);

// z = e / sqrt(kappa * integrated_c4), elementwise. Throws NumericError when
// any variance entry is not strictly positive.
Eigen::ArrayXd studentize(const Eigen::Ref<const Eigen::ArrayXd>& error,
                          const Eigen::Ref<const Eigen::ArrayXd>& integrated_c4,
                          double kappa);

// The three terms of the vhat_prime - V decomposition, each divided by
// sqrt(delta_n):
//   I   = (1/dn) sum D_{i+kn}^4           - 3 int c^2
//   II  = -2 ( sum D_{i+kn}^2 chat_i      -   int c^2 )
//   III = (1-2/kn) dn sum chat_i^2        -   int c^2
// summed over i = 1..N-kn, so I + II + III = (vhat_prime - 2 int c^2)/sqrt(dn).
struct DecompositionTerms {
  double term_i = 0.0;
  double term_ii = 0.0;
  double term_iii = 0.0;

  double sum() const { return term_i + term_ii + term_iii; }
};

DecompositionTerms decomposition_terms(const SimulatedPath& path, int k_n);

struct DecompositionDiagnostic {
  Eigen::Matrix<double, Eigen::Dynamic, 3> terms;  // one row per replication
  Eigen::Matrix3d covariance;                      // empirical covariance of (I, II, III)
  double max_identity_error = 0.0;  // worst relative deviation of I+II+III from
                                    // (vhat_prime - target)/sqrt(delta_n)
};

// Per-replication sample table for one estimator. error is the CLT-scale
// error: (estimate - target)/sqrt(delta_n), except for the u-statistic which
// already carries its sqrt(delta_n) factor and is used as-is.
struct EstimatorSamples {
  EstimatorSpec spec;
  Eigen::ArrayXd estimate;
  Eigen::ArrayXd target;
  Eigen::ArrayXd error;
  Eigen::ArrayXd z;
};

struct McReportRow {
  std::string estimator;
  long n = 0;
  int k_n = 0;
  long replications = 0;
  double mean_e = 0.0, var_e = 0.0;
  double skew_z = 0.0, kurt_z = 0.0, ks = 0.0;
  double kappa_paper = 0.0, kappa_derived = 0.0;
  double mean_target = 0.0;
  bool has_coverage = false;  // CI coverage with this estimator as plug-in
  double coverage = 0.0;
  long ci_clamped = 0;  // replications whose plug-in variance was negative
};

struct McReport {
  long n = 0;
  int k_n = 0;
  long replications = 0;
  double delta_n = 0.0;
  std::uint64_t master_seed = 0;
  std::vector<McReportRow> rows;
  std::vector<EstimatorSamples> samples;
  std::optional<DecompositionDiagnostic> decomposition;
  bool has_oracle_coverage = false;
  double oracle_coverage = 0.0;  // plug-in = true 2 int c^2 (printed on the rv row)
};

// Replicated simulate -> observe -> estimate experiment. Deterministic in
// (config, master_seed) regardless of thread count: replication r draws from
// the stream seeded by stream_seed(master_seed, r) and aggregation runs
// single-threaded in replication order. Non-finite estimates abort with the
// offending replication index rather than being dropped.
McReport run_experiment(const McConfig& config);

struct CiRow {
  std::string plugin;  // estimator token, or "true_variance" for the oracle
  double coverage = 0.0;
  long clamped = 0;
};

struct CiReport {
  double alpha = 0.0;
  long n = 0;
  int k_n = 0;
  long replications = 0;
  std::vector<CiRow> rows;
};

// Coverage of the nominal (1-alpha) interval rv +- q_{1-alpha/2} sqrt(dn Vhat)
// for int c ds, one row per quarticity plug-in in the config plus the
// true-variance oracle. alpha in (0, 1]; alpha = 1 gives zero-width intervals.
CiReport ci_experiment(McConfig config, double alpha);

}  // namespace spotquart
