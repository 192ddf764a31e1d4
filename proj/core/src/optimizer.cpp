#include "windcast/optimizer.hpp"

#include <cmath>
#include <string>

#include "windcast/errors.hpp"

namespace windcast {

std::string_view optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgdm: return "sgdm";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::rmsprop: return "rmsprop";
  }
  return "adam";
}

OptimizerKind optimizer_from_name(std::string_view name) {
  if (name == "sgdm") return OptimizerKind::sgdm;
  if (name == "adam") return OptimizerKind::adam;
  if (name == "rmsprop") return OptimizerKind::rmsprop;
  raise(ErrorCode::bad_params, "unknown optimizer '" + std::string(name) + "'");
}

OptimizerState OptimizerState::make(OptimizerKind kind, Eigen::Index size) {
  OptimizerState state;
  state.kind = kind;
  state.m1 = Eigen::VectorXd::Zero(size);
  state.m2 = Eigen::VectorXd::Zero(size);
  return state;
}

void optimizer_step(OptimizerState& state, Eigen::VectorXd& params,
                    const Eigen::VectorXd& grad, double learning_rate) {
  if (params.size() != state.m1.size() || grad.size() != state.m1.size()) {
    raise(ErrorCode::shape_mismatch,
          "optimizer state sized " + std::to_string(state.m1.size()) +
              " given params " + std::to_string(params.size()) + ", grad " +
              std::to_string(grad.size()));
  }
  ++state.step;
  switch (state.kind) {
    case OptimizerKind::sgdm: {
      state.m1 = OptimizerState::kSgdmMomentum * state.m1 + grad;
      params -= learning_rate * state.m1;
      break;
    }
    case OptimizerKind::adam: {
      state.m1 = OptimizerState::kAdamBeta1 * state.m1 +
                 (1.0 - OptimizerState::kAdamBeta1) * grad;
      state.m2 = OptimizerState::kAdamBeta2 * state.m2.array().matrix() +
                 (1.0 - OptimizerState::kAdamBeta2) *
                     grad.array().square().matrix();
      const double bc1 =
          1.0 - std::pow(OptimizerState::kAdamBeta1, state.step);
      const double bc2 =
          1.0 - std::pow(OptimizerState::kAdamBeta2, state.step);
      params.array() -= learning_rate * (state.m1.array() / bc1) /
                        ((state.m2.array() / bc2).sqrt() +
                         OptimizerState::kAdamEps);
      break;
    }
    case OptimizerKind::rmsprop: {
      state.m2 = OptimizerState::kRmsDecay * state.m2 +
                 (1.0 - OptimizerState::kRmsDecay) *
                     grad.array().square().matrix();
      params.array() -= learning_rate * grad.array() /
                        (state.m2.array().sqrt() + OptimizerState::kRmsEps);
      break;
    }
  }
}

void clip_global_norm(Eigen::VectorXd& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm > max_norm && norm > 0.0) grad *= max_norm / norm;
}

}  // namespace windcast
