#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>

namespace spotquart {

// Neumaier-compensated accumulator. Long sums (N up to 1e6 increments, 1e6
// replications) must not lose the few-percent differences the CLT checks
// resolve, so every estimator and moment reduction funnels through this.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Compensated sum of any linear-access Eigen expression.
template <typename Derived>
double compensated_sum(const Eigen::DenseBase<Derived>& xs) {
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < xs.size(); ++i)
    acc.add(static_cast<double>(xs.derived().coeff(i)));
  return acc.value();
}

struct Moments {
  Eigen::Index count = 0;
  double mean = 0.0;
  double variance = 0.0;    // sample variance (count-1 denominator), 0 if count < 2
  double skewness = 0.0;    // m3 / m2^(3/2), 0 if degenerate
  double ex_kurtosis = 0.0; // m4 / m2^2 - 3, 0 if degenerate
};

Moments moments(const Eigen::Ref<const Eigen::ArrayXd>& x);

// Standard normal CDF / density and a full-precision quantile
// (Acklam's rational approximation polished by one Halley step).
double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double p);  // p in (0,1)

// Sup distance between the empirical CDF of z and the standard normal CDF.
// Throws DataError on an empty sample.
double ks_distance(const Eigen::Ref<const Eigen::ArrayXd>& z);

// Unbiased sample covariance of rows (count-1 denominator).
Eigen::Matrix3d sample_covariance3(const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, 3>>& rows);

}  // namespace spotquart
