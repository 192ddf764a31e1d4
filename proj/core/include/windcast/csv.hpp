#pragma once

#include <string>

#include "windcast/time_series.hpp"

namespace windcast {

// CSV with a header row, comma separator, LF or CRLF line endings. The file
// must contain a `timestamp` column (ISO-8601) plus the named numeric
// column. Extra columns are ignored.
TimeSeries load_csv(const std::string& path, const std::string& column);

void write_csv(const std::string& path, const TimeSeries& series,
               const std::string& column = "speed_ms");

// Shortest-round-trip double formatting (std::to_chars); parsing the output
// with strtod reproduces the exact bits.
std::string format_double(double value);

}  // namespace windcast
