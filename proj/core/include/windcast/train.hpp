#pragma once

#include <cstdint>
#include <vector>

#include "windcast/dataset.hpp"
#include "windcast/hyperparams.hpp"
#include "windcast/lstm.hpp"

namespace windcast {

struct EpochStats {
  int epoch = 0;
  double train_mse = 0.0;  // normalized units, mean over minibatches
  double val_rmse = 0.0;   // m/s (denormalized)
};

struct TrainResult {
  LstmNetwork net;  // parameters from the best validation epoch
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_rmse = 0.0;
  double seconds = 0.0;  // wall clock for the whole loop
};

// A minibatch loss that is non-finite or above this is treated as
// divergence; bounded activations plus gradient clipping can keep an
// exploding run finite, so the guard has to catch "huge" too.
inline constexpr double kDivergenceLoss = 1e6;

// Minibatch BPTT with per-epoch seeded shuffling, global-norm gradient
// clipping at 1.0, and best-epoch selection by validation RMSE. The last
// partial minibatch is kept. Throws NonFiniteLoss on divergence.
TrainResult train(LstmNetwork net, const SupervisedSet& train_set,
                  const SupervisedSet& validation_set, const HyperParams& hp,
                  int epochs, std::uint64_t seed);

// Batched forward over a whole set, denormalized to m/s.
Eigen::VectorXd predict_denormalized(const LstmNetwork& net,
                                     const SupervisedSet& set);

Eigen::VectorXd denormalized_targets(const SupervisedSet& set);

// RMSE of predict_denormalized against the set's denormalized targets.
double evaluation_rmse(const LstmNetwork& net, const SupervisedSet& set);

}  // namespace windcast
