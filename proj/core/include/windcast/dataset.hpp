#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "windcast/time_series.hpp"

namespace windcast {

// Lagged windows paired with horizon-step-ahead targets. One column per
// sample: inputs(t, j) is timestep t of sample j, so a minibatch is a plain
// column slice. `norm` is the affine map already applied to both inputs and
// targets (identity for raw sets).
struct SupervisedSet {
  Eigen::MatrixXd inputs;                       // lag x count
  Eigen::VectorXd targets;                      // count
  std::vector<std::int64_t> target_timestamps;  // count
  int lag = 0;
  int horizon = 0;
  NormalizationParams norm;

  std::size_t size() const { return static_cast<std::size_t>(targets.size()); }

  SupervisedSet subset(std::span<const std::size_t> indices) const;
  // First max_count samples (everything when max_count == 0 or >= size).
  SupervisedSet head(std::size_t max_count) const;
};

// Sliding windows over the raw series: sample i takes values[i .. i+lag) as
// input and values[i+lag+horizon-1] as target, giving n-lag-horizon+1
// samples. No normalization is applied.
SupervisedSet make_windows(const TimeSeries& series, int lag, int horizon);

struct SplitFractions {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct SplitIndices {
  std::vector<std::size_t> train, validation, test;
};

// Chronologically contiguous blocks of block_size samples are shuffled
// (seeded), concatenated, and the stream is cut at ceil(train * n) and then
// half of the remainder. Partition sizes are exact; at most the two blocks
// at the cut points are split across partitions. Indices come back sorted.
SplitIndices block_split(std::size_t n_samples, const SplitFractions& fractions,
                         std::size_t block_size, std::uint64_t seed);

// k folds over the given training indices, sizes differing by at most one
// (the first n % k folds get the extra element). Returns (fit, holdout)
// index pairs.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
kfold_splits(std::span<const std::size_t> train_indices, int k,
             std::uint64_t seed);

// Naive baseline: predicts each target with the last input value.
Eigen::VectorXd persistence_forecast(const SupervisedSet& set);

// Train/validation/test windows with min-max normalization fitted on the
// train partition only and applied to all three.
struct ForecastData {
  SupervisedSet train, validation, test;
};

ForecastData assemble_dataset(const TimeSeries& series, int lag, int horizon,
                              const SplitFractions& fractions,
                              std::size_t block_size, std::uint64_t seed);

}  // namespace windcast
