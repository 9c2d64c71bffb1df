#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "spotquart/errors.hpp"
#include "spotquart/stats.hpp"

namespace spotquart {

// Observed increments D_i = X(i*delta_n) - X((i-1)*delta_n), i = 1..N.
struct IncrementSeries {
  double delta_n = 0.0;
  Eigen::ArrayXd values;

  Eigen::Index count() const { return values.size(); }
};

IncrementSeries increments(const Eigen::Ref<const Eigen::ArrayXd>& observations,
                           double delta_n);

// Windowed spot-variance estimates: values[i-1] covers increments i..i+k_n-1,
// i = 1..N-k_n+1. Entries are >= 0 by construction.
struct SpotVolSeries {
  int k_n = 0;
  double delta_n = 0.0;
  Eigen::ArrayXd values;
};

// Sum of squared increments (estimates int c ds).
double realized_volatility(const IncrementSeries& inc);

// Rolling average of k_n squared increments over delta_n.
SpotVolSeries spot_vol(const IncrementSeries& inc, int k_n);

// Fourth-power estimator of 2*int c^2 ds: (2/(3 delta_n)) sum_{i<=N-1} D_i^4.
// The final increment is excluded.
double quarticity_naive(const IncrementSeries& inc);

// Spot-variance-squared estimators of 2*int c^2 ds.
double vbar(const IncrementSeries& inc, int k_n);
double vbar_prime(const IncrementSeries& inc, int k_n);  // (1 - 2/k_n) * vbar

// Forward-increment estimators of 2*int c^2 ds: windows i = 1..N-k_n paired
// with the out-of-window increment i+k_n. vhat_prime carries the (1 - 2/k_n)
// factor on the squared-window term, removing the O(1/k_n) bias.
double vhat(const IncrementSeries& inc, int k_n);
double vhat_prime(const IncrementSeries& inc, int k_n);

// Bias-corrected plug-in estimator of int g(c_s) ds for a C^2 function g with
// second derivative g2. The correction (1/k_n) g''(c) c^2 cancels the
// second-order expansion of E[g(c_hat)] - g(c); with g(x) = 2x^2 this reduces
// exactly to vbar_prime.
template <typename G, typename G2>
double general_g(const IncrementSeries& inc, int k_n, G&& g, G2&& g2) {
  const SpotVolSeries spot = spot_vol(inc, k_n);
  const double corr = 1.0 / static_cast<double>(k_n);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < spot.values.size(); ++i) {
    const double ch = spot.values[i];
    const double term = g(ch) - corr * g2(ch) * ch * ch;
    if (!std::isfinite(term))
      throw NumericError("general_g: non-finite g evaluation at c = " + std::to_string(ch));
    acc.add(term);
  }
  return inc.delta_n * acc.value();
}

// Weighted centered sum sqrt(delta_n) * sum_i w(c_i) ((D_i^2)/delta_n - c_i)
// against reference spot variances at the left endpoints. Already on the CLT
// scale; its limit variance is int 2 w(c)^2 c^2 ds.
template <typename W>
double u_statistic(const IncrementSeries& inc,
                   const Eigen::Ref<const Eigen::ArrayXd>& c_ref, W&& weight) {
  if (c_ref.size() != inc.count())
    throw ConfigError("u_statistic: c_ref length must equal the increment count");
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < inc.count(); ++i) {
    const double d = inc.values[i];
    acc.add(weight(c_ref[i]) * (d * d / inc.delta_n - c_ref[i]));
  }
  return std::sqrt(inc.delta_n) * acc.value();
}

// ---------------------------------------------------------------------------
// Estimator menu

enum class EstimatorKind {
  RV,
  QuarticNaive,
  VBar,
  VBarPrime,
  VHat,
  VHatPrime,
  GeneralG,
  UStat,
};

// Built-in g menu for general_g, with exact derivatives (the bias correction
// needs g'' exactly; numerical differentiation would pollute the bias tests).
struct GFunction {
  const char* name;
  double (*g)(double);
  double (*g1)(double);
  double (*g2)(double);
};

struct WeightFunction {
  const char* name;
  double (*w)(double);
};

const GFunction& g_function(const std::string& name);       // "x", "x2", "2x2", "x3"
const WeightFunction& weight_function(const std::string& name);  // "c", "2c"

// One configured estimator instance. Tokens:
//   rv, quartic_naive, vbar, vbar_prime, vhat, vhat_prime,
//   general_g_<g> (g in {x, x2, 2x2, x3}), ustat_<w> (w in {c, 2c})
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::RV;
  const GFunction* g = nullptr;
  const WeightFunction* w = nullptr;

  std::string token() const;
  bool windowed() const {
    return kind != EstimatorKind::RV && kind != EstimatorKind::QuarticNaive &&
           kind != EstimatorKind::UStat;
  }
  // Estimators of 2*int c^2 ds, usable as CI variance plug-ins.
  bool quartic_family() const {
    return kind == EstimatorKind::QuarticNaive || kind == EstimatorKind::VBar ||
           kind == EstimatorKind::VBarPrime || kind == EstimatorKind::VHat ||
           kind == EstimatorKind::VHatPrime;
  }

  static EstimatorSpec parse(const std::string& token);
  static std::vector<EstimatorSpec> default_set();
};

// Point estimate with its configuration echo.
struct EstimateResult {
  std::string estimator;
  double value = 0.0;
  double delta_n = 0.0;
  int k_n = 0;
  long n_increments = 0;
};

// Evaluate one configured estimator on an increment series. c_ref is required
// for UStat (true spot variance at left endpoints) and ignored otherwise.
double evaluate_estimator(const EstimatorSpec& spec, const IncrementSeries& inc,
                          int k_n, const Eigen::Ref<const Eigen::ArrayXd>& c_ref);

}  // namespace spotquart
