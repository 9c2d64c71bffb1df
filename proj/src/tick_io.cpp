#include "spotquart/tick_io.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "spotquart/errors.hpp"

namespace spotquart {

namespace {

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

double parse_field(const std::string& field, long line, const char* what) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw DataError("ticks line " + std::to_string(line) + ": malformed " + what +
                    " '" + field + "'");
  return v;
}

}  // namespace

TickSeries parse_tick_csv(std::istream& in) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line))
    throw DataError("ticks: empty input, expected header 'timestamp,price'");
  ++line_no;
  if (trimmed(line) != "timestamp,price")
    throw DataError("ticks line 1: expected header 'timestamp,price'");

  TickSeries ticks;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trimmed(line);
    if (row.empty()) continue;
    const std::size_t comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
      throw DataError("ticks line " + std::to_string(line_no) +
                      ": expected exactly two fields");
    const double ts = parse_field(trimmed(row.substr(0, comma)), line_no, "timestamp");
    const double px = parse_field(trimmed(row.substr(comma + 1)), line_no, "price");
    if (!(px > 0.0))
      throw DataError("ticks line " + std::to_string(line_no) + ": price must be > 0");
    if (!ticks.timestamps.empty() && !(ts > ticks.timestamps.back()))
      throw DataError("ticks line " + std::to_string(line_no) +
                      ": timestamps must be strictly increasing");
    ticks.timestamps.push_back(ts);
    ticks.prices.push_back(px);
  }
  if (ticks.timestamps.size() < 2)
    throw DataError("ticks: need at least 2 ticks");
  return ticks;
}

ObservationSeries resample_previous_tick(const TickSeries& ticks, double delta_n,
                                         bool log_price) {
  if (!(delta_n > 0.0)) throw ConfigError("resample: delta_n must be > 0");
  if (ticks.timestamps.size() < 2) throw DataError("resample: need at least 2 ticks");

  const double t0 = ticks.timestamps.front();
  const double span = ticks.timestamps.back() - t0;
  // Tolerate representation error when the grid lands exactly on the last tick.
  const long points = static_cast<long>(std::floor(span / delta_n + 1e-9)) + 1;
  if (points < 2)
    throw DataError("resample: grid step delta_n is longer than the available data");

  ObservationSeries out;
  out.delta_n = delta_n;
  out.values.resize(points);
  std::size_t tick = 0;
  for (long j = 0; j < points; ++j) {
    const double t = t0 + static_cast<double>(j) * delta_n;
    while (tick + 1 < ticks.timestamps.size() &&
           ticks.timestamps[tick + 1] <= t + 1e-12 * delta_n)
      ++tick;
    const double px = ticks.prices[tick];
    out.values[j] = log_price ? std::log(px) : px;
  }
  return out;
}

ObservationSeries ingest_ticks(std::istream& in, double delta_n, bool log_price) {
  return resample_previous_tick(parse_tick_csv(in), delta_n, log_price);
}

}  // namespace spotquart
