#pragma once

#include <Eigen/Core>
#include <string_view>

namespace windcast {

enum class OptimizerKind { sgdm, adam, rmsprop };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind optimizer_from_name(std::string_view name);  // BadParams

// Per-parameter-vector optimizer state. m1 is the momentum / first-moment
// buffer, m2 the second-moment buffer; each kind uses what it needs.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  Eigen::VectorXd m1, m2;
  long step = 0;

  static constexpr double kAdamBeta1 = 0.9;
  static constexpr double kAdamBeta2 = 0.999;
  static constexpr double kAdamEps = 1e-8;
  static constexpr double kSgdmMomentum = 0.9;
  static constexpr double kRmsDecay = 0.9;
  static constexpr double kRmsEps = 1e-8;

  static OptimizerState make(OptimizerKind kind, Eigen::Index size);
};

// One in-place update of params given the gradient. ShapeMismatch when the
// sizes disagree with the state.
void optimizer_step(OptimizerState& state, Eigen::VectorXd& params,
                    const Eigen::VectorXd& grad, double learning_rate);

// Scales grad so its l2 norm is at most max_norm.
void clip_global_norm(Eigen::VectorXd& grad, double max_norm);

}  // namespace windcast
