#pragma once

#include <Eigen/Core>
#include <istream>
#include <vector>

namespace spotquart {

// Raw irregular tick data: strictly increasing timestamps (seconds, possibly
// fractional) and strictly positive prices.
struct TickSeries {
  std::vector<double> timestamps;
  std::vector<double> prices;
};

// Parse a CSV with header "timestamp,price". Malformed rows, non-increasing
// timestamps and non-positive prices are rejected with their line number.
TickSeries parse_tick_csv(std::istream& in);

struct ObservationSeries {
  Eigen::ArrayXd values;
  double delta_n = 0.0;
};

// Resample to a regular grid of step delta_n by previous-tick interpolation:
// the value at each grid time is the last tick at or before it. The first
// grid point sits at the first tick time; the grid extends as far as the data
// allows and must hold at least two points.
ObservationSeries resample_previous_tick(const TickSeries& ticks, double delta_n,
                                         bool log_price);

// parse + resample in one step.
ObservationSeries ingest_ticks(std::istream& in, double delta_n, bool log_price);

}  // namespace spotquart
