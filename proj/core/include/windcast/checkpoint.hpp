#pragma once

#include <cstdint>
#include <string>

#include "windcast/hyperparams.hpp"
#include "windcast/lstm.hpp"
#include "windcast/time_series.hpp"

namespace windcast {

// Self-describing text snapshot of a trained model: layer sizes, every
// parameter block (row-major), the normalization constants, window geometry,
// the training seed and the metrics recorded at save time. Reloading
// reproduces predictions bit for bit.
struct Checkpoint {
  LstmNetwork net;
  NormalizationParams norm;
  HyperParams hp;
  int lag = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  double train_rmse = 0.0;  // m/s at save time
  double test_rmse = 0.0;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace windcast
