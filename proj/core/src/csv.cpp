#include "windcast/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "windcast/errors.hpp"

namespace windcast {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_comma(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_double_strict(const std::string& text, std::size_t line_no) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    raise(ErrorCode::malformed_row,
          "line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

TimeSeries load_csv(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::file_not_found, path);

  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorCode::malformed_row, path + ": missing header row");
  }
  strip_cr(line);
  const std::vector<std::string> header = split_comma(line);

  std::size_t ts_col = header.size(), val_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "timestamp") ts_col = i;
    if (header[i] == column) val_col = i;
  }
  if (ts_col == header.size()) {
    raise(ErrorCode::missing_column, path + ": no 'timestamp' column");
  }
  if (val_col == header.size()) {
    raise(ErrorCode::missing_column, path + ": no '" + column + "' column");
  }

  TimeSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_comma(line);
    if (cells.size() != header.size()) {
      raise(ErrorCode::malformed_row,
            path + ": line " + std::to_string(line_no) + " has " +
                std::to_string(cells.size()) + " cells, expected " +
                std::to_string(header.size()));
    }
    series.timestamps.push_back(parse_iso8601(cells[ts_col]));
    const double v = parse_double_strict(cells[val_col], line_no);
    if (!std::isfinite(v) || v < 0.0) {
      raise(ErrorCode::malformed_row,
            path + ": line " + std::to_string(line_no) +
                ": speed must be finite and >= 0");
    }
    series.values.push_back(v);
  }
  series.validate();
  return series;
}

void write_csv(const std::string& path, const TimeSeries& series,
               const std::string& column) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write " + path);
  out << "timestamp," << column << "\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_iso8601(series.timestamps[i]) << ','
        << format_double(series.values[i]) << '\n';
  }
  if (!out) raise(ErrorCode::io_error, "short write to " + path);
}

}  // namespace windcast
