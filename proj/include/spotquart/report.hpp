#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "spotquart/estimators.hpp"
#include "spotquart/mc.hpp"
#include "spotquart/simulate.hpp"

namespace spotquart {

enum class ReportFormat { Table, Csv, JsonLines };

ReportFormat parse_report_format(const std::string& name);  // table | csv | json-lines

// Fixed columns, 12 significant digits:
//   estimator,n,k_n,M,mean_e,var_e,skew_z,kurt_z,ks,kappa_paper,kappa_derived,coverage
// The coverage field is empty unless the run computed it; the rv row carries
// the oracle coverage (true 2*int c^2 plugged into the interval width).
void write_mc_report_csv(const McReport& report, std::ostream& out);

void write_mc_report_json_lines(const McReport& report, std::ostream& out);

// Human-readable table plus the constant-adjudication notes.
void write_mc_report_table(const McReport& report, std::ostream& out);

void write_report(const McReport& report, ReportFormat format, std::ostream& out);

// Histogram of z over 50 equal-width bins on [-5, 5]: bin_left,bin_right,count.
void write_histogram_csv(const Eigen::Ref<const Eigen::ArrayXd>& z, std::ostream& out);

// QQ pairs theoretical_quantile,sample_quantile at levels (i-0.5)/M.
void write_qq_csv(const Eigen::Ref<const Eigen::ArrayXd>& z, std::ostream& out);

// Per-replication sample table: replication,estimator,estimate,target,e,z.
void write_samples_csv(const McReport& report, std::ostream& out);

// Fine-grid path: time,x,c (full double precision, the file round-trips).
void write_path_csv(const SimulatedPath& path, std::ostream& out);

// estimator,value,delta_n,k_n,n (value at full double precision).
void write_estimates_csv(const std::vector<EstimateResult>& results, std::ostream& out);

// plugin,alpha,n,k_n,M,coverage,clamped.
void write_ci_csv(const CiReport& report, std::ostream& out);

// replication,term_I,term_II,term_III.
void write_decomposition_csv(const DecompositionDiagnostic& diag, std::ostream& out);

// 3x3 empirical covariance of (I, II, III), one header + three rows.
void write_decomposition_covariance_csv(const DecompositionDiagnostic& diag,
                                        std::ostream& out);

}  // namespace spotquart
