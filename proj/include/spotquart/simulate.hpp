#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "spotquart/stats.hpp"

namespace spotquart {

// Drift of the log-price process: dX = rate dt + sqrt(c) dW.
struct DriftSpec {
  double rate = 0.0;
  static DriftSpec zero() { return {}; }
  static DriftSpec constant(double b) { return {b}; }
};

// Spot-variance process c_s. Three generators:
//   constant:  c_s = c
//   sinusoid:  c_s = base + amp * sin(2*pi*s/period), base > |amp| >= 0
//   heston:    dc = kappa (theta - c) dt + xi sqrt(c) dB, corr(dW, dB) = rho
struct VolatilitySpec {
  enum class Kind { Constant, Sinusoid, Heston };

  Kind kind = Kind::Constant;
  double c = 1.0;
  double base = 0.0, amp = 0.0, period = 1.0;
  double kappa = 0.0, theta = 0.0, xi = 0.0, rho = 0.0, c0 = 0.0;

  static VolatilitySpec constant(double c);
  static VolatilitySpec sinusoid(double base, double amp, double period);
  static VolatilitySpec heston(double kappa, double theta, double xi, double rho, double c0);
};

struct ModelSpec {
  DriftSpec drift;
  VolatilitySpec vol;

  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

// Uniform grids: n observation intervals of length delta_n = horizon/n, each
// refined into `substeps` Euler steps of length delta_n/substeps.
struct SamplingSpec {
  double horizon = 1.0;
  long n = 0;
  int substeps = 1;

  double delta_n() const { return horizon / static_cast<double>(n); }
  double fine_step() const { return delta_n() / static_cast<double>(substeps); }
  long fine_steps() const { return n * static_cast<long>(substeps); }

  void validate() const;
};

// One simulated path on the fine grid, together with the true spot variance
// that produced it. Immutable after construction; safe to share across
// threads. Identical (model, sampling, seed) reproduce it bit for bit.
struct SimulatedPath {
  Eigen::ArrayXd times;  // fine_steps()+1 points, times[0] = 0
  Eigen::ArrayXd x;      // path values, x[0] = 0
  Eigen::ArrayXd c;      // true spot variance at each grid point, >= 0
  std::uint64_t seed = 0;

  double horizon = 0.0;
  long n = 0;
  int substeps = 1;

  long fine_steps() const { return n * static_cast<long>(substeps); }
  double delta_n() const { return horizon / static_cast<double>(n); }
  double fine_step() const { return delta_n() / static_cast<double>(substeps); }
};

// Euler–Maruyama on the fine grid (full-truncation Euler for the Heston
// variance). X0 = 0.
SimulatedPath simulate_path(const ModelSpec& model, const SamplingSpec& sampling,
                            std::uint64_t seed);

// Downsample to the observation grid: x at indices 0, s, 2s, ..., n*s.
Eigen::ArrayXd observe(const SimulatedPath& path);

// True spot variance at the left endpoint of each observation interval
// (n values: c at fine indices 0, s, ..., (n-1)*s).
Eigen::ArrayXd observed_spot_variance(const SimulatedPath& path);

// Trapezoidal rule for int_0^t f(c_s) ds on the fine grid.
template <typename F>
double integrate_spot_functional(const SimulatedPath& path, F&& f) {
  CompensatedSum acc;
  const Eigen::Index last = path.c.size() - 1;
  for (Eigen::Index i = 0; i <= last; ++i) acc.add(f(path.c[i]));
  acc.add(-0.5 * (f(path.c[0]) + f(path.c[last])));
  return acc.value() * path.fine_step();
}

// Trapezoidal rule for int_0^t c_s^p ds, p >= 1.
double true_integrated_power(const SimulatedPath& path, int power);

}  // namespace spotquart
