#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace windcast {

// Uniformly sampled wind-speed series. Timestamps are Unix seconds (UTC),
// strictly increasing with a constant step; values are finite and >= 0 m/s.
struct TimeSeries {
  std::vector<std::int64_t> timestamps;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::int64_t step_seconds() const;
  void validate() const;
};

// Affine map x -> (x - shift) / scale with scale > 0. Min-max fitting puts
// the fitted range onto [0, 1]; out-of-range inputs extrapolate linearly.
struct NormalizationParams {
  double shift = 0.0;
  double scale = 1.0;

  double normalize(double x) const { return (x - shift) / scale; }
  double denormalize(double y) const { return y * scale + shift; }
};

// Fit on exactly the given values (callers pass the training partition).
// Throws ConstantSeries when max == min.
NormalizationParams fit_minmax(std::span<const double> values);

// Convenience: fit on the whole series and return the transformed values.
std::pair<std::vector<double>, NormalizationParams> normalize(
    const TimeSeries& series);

// "YYYY-MM-DDTHH:MM:SS" (or a space separator, optional trailing 'Z').
std::int64_t parse_iso8601(const std::string& text);
std::string format_iso8601(std::int64_t epoch_seconds);

}  // namespace windcast
