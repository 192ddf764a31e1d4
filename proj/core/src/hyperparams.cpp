#include "windcast/hyperparams.hpp"

#include <cmath>
#include <string>

#include "windcast/errors.hpp"

namespace windcast {

void HyperParams::validate() const {
  if (hidden_layers < 1 || hidden_layers > 2) {
    raise(ErrorCode::bad_params,
          "hidden_layers must be 1 or 2, got " + std::to_string(hidden_layers));
  }
  for (int l = 0; l < hidden_layers; ++l) {
    if (units[static_cast<std::size_t>(l)] < 1) {
      raise(ErrorCode::bad_params, "layer units must be >= 1");
    }
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    raise(ErrorCode::bad_params, "learning rate must be positive and finite");
  }
  if (batch_size < 1) raise(ErrorCode::bad_params, "batch size must be >= 1");
}

std::vector<int> HyperParams::units_vector() const {
  validate();
  std::vector<int> out(static_cast<std::size_t>(hidden_layers));
  for (int l = 0; l < hidden_layers; ++l) {
    out[static_cast<std::size_t>(l)] = units[static_cast<std::size_t>(l)];
  }
  return out;
}

}  // namespace windcast
