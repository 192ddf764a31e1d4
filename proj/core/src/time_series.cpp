#include "windcast/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "windcast/errors.hpp"

namespace windcast {

std::int64_t TimeSeries::step_seconds() const {
  if (timestamps.size() < 2) {
    raise(ErrorCode::series_too_short, "need at least 2 points for a step");
  }
  return timestamps[1] - timestamps[0];
}

void TimeSeries::validate() const {
  if (timestamps.size() != values.size()) {
    raise(ErrorCode::length_mismatch, "timestamps and values differ in length");
  }
  if (values.size() < 2) {
    raise(ErrorCode::series_too_short, "series needs at least 2 points");
  }
  const std::int64_t step = timestamps[1] - timestamps[0];
  if (step <= 0) {
    raise(ErrorCode::non_uniform_timestep, "timestamps must strictly increase");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] - timestamps[i - 1] != step) {
      raise(ErrorCode::non_uniform_timestep,
            "uneven step at row " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      raise(ErrorCode::malformed_row,
            "value at row " + std::to_string(i) + " is negative or not finite");
    }
  }
}

NormalizationParams fit_minmax(std::span<const double> values) {
  if (values.empty()) raise(ErrorCode::empty_input, "no values to fit");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi == *lo) {
    raise(ErrorCode::constant_series, "min-max fit on a constant series");
  }
  return NormalizationParams{*lo, *hi - *lo};
}

std::pair<std::vector<double>, NormalizationParams> normalize(
    const TimeSeries& series) {
  NormalizationParams params = fit_minmax(series.values);
  std::vector<double> out(series.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = params.normalize(series.values[i]);
  }
  return {std::move(out), params};
}

namespace {

// Howard Hinnant's days-from-civil; valid across the whole int64 range we
// care about and independent of the C library's timezone state.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m,
                     unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool parse_fixed_uint(const std::string& s, std::size_t pos, std::size_t len,
                      long& out) {
  out = 0;
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

}  // namespace

std::int64_t parse_iso8601(const std::string& text) {
  // YYYY-MM-DD[T ]HH:MM:SS with optional trailing 'Z'.
  long y, mo, d, h, mi, s;
  const bool shape_ok =
      text.size() >= 19 && text.size() <= 20 &&
      parse_fixed_uint(text, 0, 4, y) && text[4] == '-' &&
      parse_fixed_uint(text, 5, 2, mo) && text[7] == '-' &&
      parse_fixed_uint(text, 8, 2, d) &&
      (text[10] == 'T' || text[10] == ' ') &&
      parse_fixed_uint(text, 11, 2, h) && text[13] == ':' &&
      parse_fixed_uint(text, 14, 2, mi) && text[16] == ':' &&
      parse_fixed_uint(text, 17, 2, s) &&
      (text.size() == 19 || text[19] == 'Z');
  if (!shape_ok || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 ||
      s > 60) {
    raise(ErrorCode::malformed_row, "bad timestamp '" + text + "'");
  }
  return days_from_civil(y, static_cast<unsigned>(mo),
                         static_cast<unsigned>(d)) *
             86400 +
         h * 3600 + mi * 60 + s;
}

std::string format_iso8601(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lld",
                static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace windcast
