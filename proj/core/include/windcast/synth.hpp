#pragma once

#include <cstdint>

#include "windcast/time_series.hpp"

namespace windcast {

// Synthetic wind generator: an AR(1) latent Gaussian is pushed through the
// standard-normal CDF and the inverse Weibull CDF, giving a series whose
// marginal is Weibull(shape, scale) with tunable lag-1 autocorrelation, plus
// an optional additive diurnal sine (24 h period).
struct SynthParams {
  double weibull_shape = 2.0;
  double weibull_scale = 9.6;      // m/s
  double ar_coeff = 0.9;           // latent lag-1 correlation, [0, 0.999]
  double diurnal_amplitude = 0.0;  // m/s
  // Cut-in clamp: values below this are raised to it, mirroring anemometer
  // cut-in and keeping observations clear of the MAPE near-zero guard.
  double floor = 0.15;             // m/s
};

TimeSeries synth_wind(std::size_t n, int step_minutes, std::uint64_t seed,
                      const SynthParams& params = {});

}  // namespace windcast
