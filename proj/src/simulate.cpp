#include "spotquart/simulate.hpp"

#include <cmath>

#include "spotquart/errors.hpp"
#include "spotquart/rng.hpp"

namespace spotquart {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr long kMaxFinePoints = 1L << 31;  // array-size guard

bool finite(double x) { return std::isfinite(x); }
}  // namespace

VolatilitySpec VolatilitySpec::constant(double c) {
  VolatilitySpec v;
  v.kind = Kind::Constant;
  v.c = c;
  return v;
}

VolatilitySpec VolatilitySpec::sinusoid(double base, double amp, double period) {
  VolatilitySpec v;
  v.kind = Kind::Sinusoid;
  v.base = base;
  v.amp = amp;
  v.period = period;
  return v;
}

VolatilitySpec VolatilitySpec::heston(double kappa, double theta, double xi,
                                      double rho, double c0) {
  VolatilitySpec v;
  v.kind = Kind::Heston;
  v.kappa = kappa;
  v.theta = theta;
  v.xi = xi;
  v.rho = rho;
  v.c0 = c0;
  return v;
}

void ModelSpec::validate() const {
  if (!finite(drift.rate)) throw ConfigError("model: drift rate must be finite");
  switch (vol.kind) {
    case VolatilitySpec::Kind::Constant:
      if (!finite(vol.c) || vol.c < 0.0)
        throw ConfigError("model: constant volatility requires spot variance c >= 0");
      break;
    case VolatilitySpec::Kind::Sinusoid:
      if (!finite(vol.base) || !finite(vol.amp) || !(vol.base > std::abs(vol.amp)))
        throw ConfigError("model: sinusoid volatility requires base > |amp| >= 0");
      if (!(vol.period > 0.0))
        throw ConfigError("model: sinusoid volatility requires period > 0");
      break;
    case VolatilitySpec::Kind::Heston:
      if (!(vol.kappa > 0.0) || !(vol.theta > 0.0) || !(vol.xi > 0.0) || !(vol.c0 > 0.0))
        throw ConfigError("model: heston requires kappa, theta, xi, c0 > 0");
      if (!(vol.rho >= -1.0 && vol.rho <= 1.0))
        throw ConfigError("model: heston requires rho in [-1, 1]");
      if (2.0 * vol.kappa * vol.theta < vol.xi * vol.xi)
        throw ConfigError("model: heston violates the Feller condition 2*kappa*theta >= xi^2");
      break;
  }
}

void SamplingSpec::validate() const {
  if (!(horizon > 0.0)) throw ConfigError("sampling: horizon t must be > 0");
  if (n < 2) throw ConfigError("sampling: observation count n must be >= 2");
  if (substeps < 1) throw ConfigError("sampling: substeps must be >= 1");
  if (n > kMaxFinePoints / substeps)
    throw ConfigError("sampling: fine grid n*substeps exceeds the array-size limit");
}

SimulatedPath simulate_path(const ModelSpec& model, const SamplingSpec& sampling,
                            std::uint64_t seed) {
  model.validate();
  sampling.validate();

  const long steps = sampling.fine_steps();
  const double delta = sampling.fine_step();
  const double sqrt_delta = std::sqrt(delta);

  SimulatedPath path;
  path.seed = seed;
  path.horizon = sampling.horizon;
  path.n = sampling.n;
  path.substeps = sampling.substeps;
  path.times.resize(steps + 1);
  path.x.resize(steps + 1);
  path.c.resize(steps + 1);
  for (long k = 0; k <= steps; ++k) path.times[k] = static_cast<double>(k) * delta;

  GaussianSampler gauss(seed);
  const double b = model.drift.rate;
  path.x[0] = 0.0;

  switch (model.vol.kind) {
    case VolatilitySpec::Kind::Constant: {
      path.c.setConstant(model.vol.c);
      const double scale = std::sqrt(model.vol.c) * sqrt_delta;
      for (long k = 0; k < steps; ++k)
        path.x[k + 1] = path.x[k] + b * delta + scale * gauss();
      break;
    }
    case VolatilitySpec::Kind::Sinusoid: {
      const double w = kTwoPi / model.vol.period;
      for (long k = 0; k <= steps; ++k)
        path.c[k] = model.vol.base + model.vol.amp * std::sin(w * path.times[k]);
      for (long k = 0; k < steps; ++k)
        path.x[k + 1] = path.x[k] + b * delta + std::sqrt(path.c[k]) * sqrt_delta * gauss();
      break;
    }
    case VolatilitySpec::Kind::Heston: {
      // Full-truncation Euler: coefficients use c clamped at 0 and the
      // variance is clamped again after each step, so c >= 0 throughout.
      const double rho = model.vol.rho;
      const double rho_bar = std::sqrt(1.0 - rho * rho);
      path.c[0] = model.vol.c0;
      for (long k = 0; k < steps; ++k) {
        const double cp = path.c[k] > 0.0 ? path.c[k] : 0.0;
        const double vol = std::sqrt(cp) * sqrt_delta;
        const double zx = gauss();
        const double zc = gauss();
        const double eta = rho * zx + rho_bar * zc;
        path.x[k + 1] = path.x[k] + b * delta + vol * zx;
        const double cn = path.c[k] + model.vol.kappa * (model.vol.theta - cp) * delta +
                          model.vol.xi * vol * eta;
        path.c[k + 1] = cn > 0.0 ? cn : 0.0;
      }
      break;
    }
  }
  return path;
}

Eigen::ArrayXd observe(const SimulatedPath& path) {
  const long s = path.substeps;
  Eigen::ArrayXd out(path.n + 1);
  for (long i = 0; i <= path.n; ++i) out[i] = path.x[i * s];
  return out;
}

Eigen::ArrayXd observed_spot_variance(const SimulatedPath& path) {
  const long s = path.substeps;
  Eigen::ArrayXd out(path.n);
  for (long i = 0; i < path.n; ++i) out[i] = path.c[i * s];
  return out;
}

double true_integrated_power(const SimulatedPath& path, int power) {
  if (power < 1) throw ConfigError("true_integrated_power: power must be >= 1");
  return integrate_spot_functional(path, [power](double c) {
    double r = c;
    for (int k = 1; k < power; ++k) r *= c;
    return r;
  });
}

}  // namespace spotquart
