#include "windcast/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "windcast/errors.hpp"
#include "windcast/metrics.hpp"
#include "windcast/optimizer.hpp"
#include "windcast/rng.hpp"

namespace windcast {

namespace {

constexpr Eigen::Index kPredictChunk = 2048;
constexpr double kClipNorm = 1.0;

}  // namespace

Eigen::VectorXd predict_denormalized(const LstmNetwork& net,
                                     const SupervisedSet& set) {
  if (set.size() == 0) raise(ErrorCode::empty_set, "no samples to predict");
  const Eigen::Index n = set.targets.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index start = 0; start < n; start += kPredictChunk) {
    const Eigen::Index len = std::min(kPredictChunk, n - start);
    out.segment(start, len) = predict(net, set.inputs.middleCols(start, len));
  }
  return (out.array() * set.norm.scale + set.norm.shift).matrix();
}

Eigen::VectorXd denormalized_targets(const SupervisedSet& set) {
  return (set.targets.array() * set.norm.scale + set.norm.shift).matrix();
}

double evaluation_rmse(const LstmNetwork& net, const SupervisedSet& set) {
  const Eigen::VectorXd pred = predict_denormalized(net, set);
  const Eigen::VectorXd obs = denormalized_targets(set);
  return rmse(as_span(pred), as_span(obs));
}

TrainResult train(LstmNetwork net, const SupervisedSet& train_set,
                  const SupervisedSet& validation_set, const HyperParams& hp,
                  int epochs, std::uint64_t seed) {
  hp.validate();
  if (epochs < 1) raise(ErrorCode::bad_params, "epochs must be >= 1");
  if (train_set.size() == 0) raise(ErrorCode::empty_set, "empty training set");
  if (validation_set.size() == 0) {
    raise(ErrorCode::empty_set, "empty validation set");
  }

  const auto t0 = std::chrono::steady_clock::now();

  const Eigen::Index n = train_set.targets.size();
  const Eigen::Index batch =
      std::min<Eigen::Index>(hp.batch_size, n);

  Eigen::VectorXd params = net.flatten();
  OptimizerState opt = OptimizerState::make(hp.optimizer, params.size());

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});

  Eigen::MatrixXd batch_inputs(train_set.inputs.rows(), batch);
  Eigen::VectorXd batch_targets(batch);

  TrainResult result;
  result.best_val_rmse = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_params = params;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    SeededRng shuffle_rng(derive_seed(seed, "epoch-shuffle",
                                      static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index len = std::min(batch, n - start);
      for (Eigen::Index j = 0; j < len; ++j) {
        const auto src =
            static_cast<Eigen::Index>(order[static_cast<std::size_t>(start + j)]);
        batch_inputs.col(j) = train_set.inputs.col(src);
        batch_targets(j) = train_set.targets(src);
      }

      double batch_loss = 0.0;
      Eigen::VectorXd grad =
          backward_bptt(net, batch_inputs.leftCols(len),
                        batch_targets.head(len), &batch_loss);
      if (!std::isfinite(batch_loss) || batch_loss > kDivergenceLoss) {
        raise(ErrorCode::non_finite_loss,
              "training diverged at epoch " + std::to_string(epoch) +
                  " (minibatch loss " + std::to_string(batch_loss) + ")");
      }
      loss_sum += batch_loss * static_cast<double>(len);

      clip_global_norm(grad, kClipNorm);
      optimizer_step(opt, params, grad, hp.learning_rate);
      net.unflatten(params);
    }

    const double val_rmse = evaluation_rmse(net, validation_set);
    result.history.push_back(
        {epoch, loss_sum / static_cast<double>(n), val_rmse});
    if (val_rmse < result.best_val_rmse) {
      result.best_val_rmse = val_rmse;
      result.best_epoch = epoch;
      best_params = params;
    }
  }

  net.unflatten(best_params);
  result.net = std::move(net);
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return result;
}

}  // namespace windcast
