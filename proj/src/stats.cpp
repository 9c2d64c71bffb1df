#include "spotquart/stats.hpp"

#include <algorithm>
#include <vector>

#include "spotquart/errors.hpp"

namespace spotquart {

Moments moments(const Eigen::Ref<const Eigen::ArrayXd>& x) {
  Moments m;
  m.count = x.size();
  if (m.count == 0) return m;

  m.mean = compensated_sum(x) / static_cast<double>(m.count);

  CompensatedSum s2, s3, s4;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - m.mean;
    const double d2 = d * d;
    s2.add(d2);
    s3.add(d2 * d);
    s4.add(d2 * d2);
  }
  const double n = static_cast<double>(m.count);
  const double m2 = s2.value() / n;
  m.variance = m.count > 1 ? s2.value() / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    m.skewness = (s3.value() / n) / std::pow(m2, 1.5);
    m.ex_kurtosis = (s4.value() / n) / (m2 * m2) - 3.0;
  }
  return m;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double normal_pdf(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

namespace {

// Acklam's inverse-normal approximation (~1.15e-9 relative), then one Halley
// step against erfc brings it to full double precision.
double acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;

  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw NumericError("normal_quantile: p must lie in (0, 1)");
  double x = acklam(p);
  const double e = normal_cdf(x) - p;
  const double u = e / normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double ks_distance(const Eigen::Ref<const Eigen::ArrayXd>& z) {
  if (z.size() == 0) throw DataError("ks_distance: empty sample");
  std::vector<double> v(z.data(), z.data() + z.size());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double cdf = normal_cdf(v[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / n);
  }
  return d;
}

Eigen::Matrix3d sample_covariance3(
    const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, 3>>& rows) {
  const Eigen::Index m = rows.rows();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  if (m < 2) return cov;
  const Eigen::RowVector3d mean = rows.colwise().mean();
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      CompensatedSum acc;
      for (Eigen::Index i = 0; i < m; ++i)
        acc.add((rows(i, a) - mean[a]) * (rows(i, b) - mean[b]));
      cov(a, b) = cov(b, a) = acc.value() / static_cast<double>(m - 1);
    }
  }
  return cov;
}

}  // namespace spotquart
