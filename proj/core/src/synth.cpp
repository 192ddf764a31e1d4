#include "windcast/synth.hpp"

#include <cmath>
#include <numbers>

#include "windcast/errors.hpp"
#include "windcast/rng.hpp"

namespace windcast {

namespace {

constexpr std::int64_t kOriginEpoch = 1577836800;  // 2020-01-01T00:00:00Z

// Upper tail P(Z > z), stable for large z.
double normal_upper_tail(double z) {
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

}  // namespace

TimeSeries synth_wind(std::size_t n, int step_minutes, std::uint64_t seed,
                      const SynthParams& params) {
  if (n < 2) raise(ErrorCode::bad_params, "synth needs n >= 2");
  if (step_minutes <= 0) raise(ErrorCode::bad_params, "step must be positive");
  if (!(params.weibull_shape > 0.0) || !(params.weibull_scale > 0.0)) {
    raise(ErrorCode::bad_params, "Weibull shape and scale must be positive");
  }
  if (!(params.ar_coeff >= 0.0) || !(params.ar_coeff <= 0.999)) {
    raise(ErrorCode::bad_params, "ar_coeff must lie in [0, 0.999]");
  }
  if (!(params.diurnal_amplitude >= 0.0)) {
    raise(ErrorCode::bad_params, "diurnal amplitude must be >= 0");
  }
  if (!(params.floor >= 0.0)) raise(ErrorCode::bad_params, "floor must be >= 0");

  SeededRng rng(seed);
  const double phi = params.ar_coeff;
  const double innovation = std::sqrt(1.0 - phi * phi);
  const double inv_shape = 1.0 / params.weibull_shape;

  TimeSeries series;
  series.timestamps.resize(n);
  series.values.resize(n);

  double z = rng.gauss();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) z = phi * z + innovation * rng.gauss();
    // Weibull quantile of Phi(z); 1 - Phi(z) is evaluated as the upper tail
    // so extreme z never hits log(0).
    double tail = normal_upper_tail(z);
    if (tail < 1e-300) tail = 1e-300;
    double v = params.weibull_scale * std::pow(-std::log(tail), inv_shape);

    const std::int64_t ts =
        kOriginEpoch + static_cast<std::int64_t>(i) * 60 * step_minutes;
    const double minute_of_day = static_cast<double>((ts % 86400) / 60);
    v += params.diurnal_amplitude *
         std::sin(2.0 * std::numbers::pi * minute_of_day / 1440.0);

    series.timestamps[i] = ts;
    series.values[i] = std::max(v, params.floor);
  }
  return series;
}

}  // namespace windcast
