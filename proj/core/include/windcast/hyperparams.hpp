#pragma once

#include <array>
#include <vector>

#include "windcast/optimizer.hpp"

namespace windcast {

// Trainable-model hyperparameters. Defaults match the hand-tuned baseline
// configuration. validate() enforces structural sanity; the tuner applies
// its tighter search box separately.
struct HyperParams {
  int hidden_layers = 2;           // 1 or 2
  std::array<int, 2> units{125, 100};  // units[1] is ignored for 1 layer
  double learning_rate = 1e-3;
  int batch_size = 512;
  OptimizerKind optimizer = OptimizerKind::adam;

  void validate() const;
  std::vector<int> units_vector() const;

  bool operator==(const HyperParams&) const = default;
};

}  // namespace windcast
