#include "spotquart/estimators.hpp"

#include <cmath>
#include <vector>

namespace spotquart {

IncrementSeries increments(const Eigen::Ref<const Eigen::ArrayXd>& observations,
                           double delta_n) {
  if (observations.size() < 2)
    throw ConfigError("increments: need at least 2 observations");
  if (!(delta_n > 0.0)) throw ConfigError("increments: delta_n must be > 0");
  IncrementSeries inc;
  inc.delta_n = delta_n;
  inc.values = observations.tail(observations.size() - 1) -
               observations.head(observations.size() - 1);
  return inc;
}

double realized_volatility(const IncrementSeries& inc) {
  return compensated_sum(inc.values.square());
}

SpotVolSeries spot_vol(const IncrementSeries& inc, int k_n) {
  const Eigen::Index n = inc.count();
  if (k_n < 2) throw ConfigError("spot_vol: window k_n must be >= 2");
  if (k_n > n) throw ConfigError("spot_vol: window k_n exceeds the increment count");

  // Extended-precision prefix sums keep window differencing accurate out to
  // N ~ 1e6 without an O(N*k_n) rescan.
  std::vector<long double> prefix(static_cast<std::size_t>(n) + 1, 0.0L);
  for (Eigen::Index i = 0; i < n; ++i) {
    const long double d = inc.values[i];
    prefix[i + 1] = prefix[i] + d * d;
  }

  SpotVolSeries spot;
  spot.k_n = k_n;
  spot.delta_n = inc.delta_n;
  spot.values.resize(n - k_n + 1);
  const long double norm = 1.0L / (static_cast<long double>(k_n) * inc.delta_n);
  for (Eigen::Index i = 0; i + k_n <= n; ++i)
    spot.values[i] = static_cast<double>((prefix[i + k_n] - prefix[i]) * norm);
  return spot;
}

double quarticity_naive(const IncrementSeries& inc) {
  const Eigen::Index n = inc.count();
  if (n < 2) throw ConfigError("quarticity_naive: need at least 2 increments");
  CompensatedSum acc;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double d2 = inc.values[i] * inc.values[i];
    acc.add(d2 * d2);
  }
  return 2.0 / (3.0 * inc.delta_n) * acc.value();
}

double vbar(const IncrementSeries& inc, int k_n) {
  const SpotVolSeries spot = spot_vol(inc, k_n);
  return 2.0 * inc.delta_n * compensated_sum(spot.values.square());
}

double vbar_prime(const IncrementSeries& inc, int k_n) {
  return (1.0 - 2.0 / static_cast<double>(k_n)) * vbar(inc, k_n);
}

namespace {

double vhat_impl(const IncrementSeries& inc, int k_n, double window_factor) {
  const Eigen::Index n = inc.count();
  if (k_n >= n)
    throw ConfigError("vhat: needs k_n < N so a window and its forward increment both exist");
  const SpotVolSeries spot = spot_vol(inc, k_n);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i + k_n < n; ++i) {
    const double d = inc.values[i + k_n];
    const double d2 = d * d;
    const double cd = spot.values[i] * inc.delta_n;
    acc.add(d2 * d2 - 2.0 * d2 * cd + window_factor * cd * cd);
  }
  return acc.value() / inc.delta_n;
}

}  // namespace

double vhat(const IncrementSeries& inc, int k_n) { return vhat_impl(inc, k_n, 1.0); }

double vhat_prime(const IncrementSeries& inc, int k_n) {
  return vhat_impl(inc, k_n, 1.0 - 2.0 / static_cast<double>(k_n));
}

namespace {

const GFunction kGFunctions[] = {
    {"x", [](double x) { return x; }, [](double) { return 1.0; },
     [](double) { return 0.0; }},
    {"x2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; },
     [](double) { return 2.0; }},
    {"2x2", [](double x) { return 2.0 * x * x; }, [](double x) { return 4.0 * x; },
     [](double) { return 4.0; }},
    {"x3", [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; },
     [](double x) { return 6.0 * x; }},
};

const WeightFunction kWeights[] = {
    {"c", [](double c) { return c; }},
    {"2c", [](double c) { return 2.0 * c; }},
};

}  // namespace

const GFunction& g_function(const std::string& name) {
  for (const auto& g : kGFunctions)
    if (name == g.name) return g;
  throw ConfigError("unknown g function '" + name + "' (choose x, x2, 2x2, x3)");
}

const WeightFunction& weight_function(const std::string& name) {
  for (const auto& w : kWeights)
    if (name == w.name) return w;
  throw ConfigError("unknown u-statistic weight '" + name + "' (choose c, 2c)");
}

std::string EstimatorSpec::token() const {
  switch (kind) {
    case EstimatorKind::RV: return "rv";
    case EstimatorKind::QuarticNaive: return "quartic_naive";
    case EstimatorKind::VBar: return "vbar";
    case EstimatorKind::VBarPrime: return "vbar_prime";
    case EstimatorKind::VHat: return "vhat";
    case EstimatorKind::VHatPrime: return "vhat_prime";
    case EstimatorKind::GeneralG: return std::string("general_g_") + g->name;
    case EstimatorKind::UStat: return std::string("ustat_") + w->name;
  }
  return "?";
}

EstimatorSpec EstimatorSpec::parse(const std::string& token) {
  EstimatorSpec spec;
  if (token == "rv") {
    spec.kind = EstimatorKind::RV;
  } else if (token == "quartic_naive") {
    spec.kind = EstimatorKind::QuarticNaive;
  } else if (token == "vbar") {
    spec.kind = EstimatorKind::VBar;
  } else if (token == "vbar_prime") {
    spec.kind = EstimatorKind::VBarPrime;
  } else if (token == "vhat") {
    spec.kind = EstimatorKind::VHat;
  } else if (token == "vhat_prime") {
    spec.kind = EstimatorKind::VHatPrime;
  } else if (token.rfind("general_g_", 0) == 0) {
    spec.kind = EstimatorKind::GeneralG;
    spec.g = &g_function(token.substr(10));
  } else if (token.rfind("ustat_", 0) == 0) {
    spec.kind = EstimatorKind::UStat;
    spec.w = &weight_function(token.substr(6));
  } else {
    throw ConfigError("unknown estimator '" + token + "'");
  }
  return spec;
}

std::vector<EstimatorSpec> EstimatorSpec::default_set() {
  std::vector<EstimatorSpec> set;
  for (const char* token :
       {"rv", "quartic_naive", "vbar", "vbar_prime", "vhat", "vhat_prime",
        "general_g_x", "general_g_x2", "general_g_2x2", "general_g_x3", "ustat_c",
        "ustat_2c"})
    set.push_back(parse(token));
  return set;
}

double evaluate_estimator(const EstimatorSpec& spec, const IncrementSeries& inc,
                          int k_n, const Eigen::Ref<const Eigen::ArrayXd>& c_ref) {
  switch (spec.kind) {
    case EstimatorKind::RV: return realized_volatility(inc);
    case EstimatorKind::QuarticNaive: return quarticity_naive(inc);
    case EstimatorKind::VBar: return vbar(inc, k_n);
    case EstimatorKind::VBarPrime: return vbar_prime(inc, k_n);
    case EstimatorKind::VHat: return vhat(inc, k_n);
    case EstimatorKind::VHatPrime: return vhat_prime(inc, k_n);
    case EstimatorKind::GeneralG: return general_g(inc, k_n, spec.g->g, spec.g->g2);
    case EstimatorKind::UStat: return u_statistic(inc, c_ref, spec.w->w);
  }
  throw ConfigError("evaluate_estimator: unhandled estimator kind");
}

}  // namespace spotquart
