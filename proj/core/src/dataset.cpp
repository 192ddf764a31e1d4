#include "windcast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "windcast/errors.hpp"
#include "windcast/rng.hpp"

namespace windcast {

SupervisedSet SupervisedSet::subset(
    std::span<const std::size_t> indices) const {
  SupervisedSet out;
  out.lag = lag;
  out.horizon = horizon;
  out.norm = norm;
  out.inputs.resize(inputs.rows(), static_cast<Eigen::Index>(indices.size()));
  out.targets.resize(static_cast<Eigen::Index>(indices.size()));
  out.target_timestamps.reserve(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const auto src = static_cast<Eigen::Index>(indices[j]);
    if (src < 0 || src >= targets.size()) {
      raise(ErrorCode::dimension_mismatch, "subset index out of range");
    }
    out.inputs.col(static_cast<Eigen::Index>(j)) = inputs.col(src);
    out.targets(static_cast<Eigen::Index>(j)) = targets(src);
    out.target_timestamps.push_back(target_timestamps[indices[j]]);
  }
  return out;
}

SupervisedSet SupervisedSet::head(std::size_t max_count) const {
  if (max_count == 0 || max_count >= size()) return *this;
  SupervisedSet out;
  out.lag = lag;
  out.horizon = horizon;
  out.norm = norm;
  const auto k = static_cast<Eigen::Index>(max_count);
  out.inputs = inputs.leftCols(k);
  out.targets = targets.head(k);
  out.target_timestamps.assign(target_timestamps.begin(),
                               target_timestamps.begin() + k);
  return out;
}

SupervisedSet make_windows(const TimeSeries& series, int lag, int horizon) {
  if (lag < 1) raise(ErrorCode::bad_params, "lag must be >= 1");
  if (horizon < 1) raise(ErrorCode::bad_params, "horizon must be >= 1");
  series.validate();

  const std::size_t n = series.size();
  const std::size_t need = static_cast<std::size_t>(lag) + horizon;
  if (n < need) {
    raise(ErrorCode::series_too_short,
          "series of length " + std::to_string(n) + " cannot produce lag=" +
              std::to_string(lag) + ", horizon=" + std::to_string(horizon) +
              " windows");
  }
  const std::size_t count = n - need + 1;

  SupervisedSet set;
  set.lag = lag;
  set.horizon = horizon;
  set.inputs.resize(lag, static_cast<Eigen::Index>(count));
  set.targets.resize(static_cast<Eigen::Index>(count));
  set.target_timestamps.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (int t = 0; t < lag; ++t) {
      set.inputs(t, static_cast<Eigen::Index>(i)) = series.values[i + t];
    }
    const std::size_t target_idx = i + need - 1;
    set.targets(static_cast<Eigen::Index>(i)) = series.values[target_idx];
    set.target_timestamps[i] = series.timestamps[target_idx];
  }
  return set;
}

SplitIndices block_split(std::size_t n_samples, const SplitFractions& fractions,
                         std::size_t block_size, std::uint64_t seed) {
  if (block_size < 1) raise(ErrorCode::bad_params, "block size must be >= 1");
  if (n_samples < 3 * block_size) {
    raise(ErrorCode::too_few_samples,
          std::to_string(n_samples) + " samples with block size " +
              std::to_string(block_size) + " (need at least " +
              std::to_string(3 * block_size) + ")");
  }
  const double sum = fractions.train + fractions.validation + fractions.test;
  if (!(fractions.train > 0.0) || !(fractions.validation > 0.0) ||
      !(fractions.test > 0.0) || std::abs(sum - 1.0) > 1e-9) {
    raise(ErrorCode::bad_params, "split fractions must be positive and sum to 1");
  }

  const std::size_t n_train = static_cast<std::size_t>(
      std::ceil(fractions.train * static_cast<double>(n_samples)));
  const std::size_t rem = n_samples - std::min(n_samples, n_train);
  const std::size_t n_val = static_cast<std::size_t>(std::ceil(
      static_cast<double>(rem) * fractions.validation /
      (fractions.validation + fractions.test)));
  const std::size_t n_test = rem - n_val;
  if (n_train == 0 || n_val == 0 || n_test == 0 || n_train >= n_samples) {
    raise(ErrorCode::too_few_samples,
          std::to_string(n_samples) + " samples cannot fill all partitions");
  }

  const std::size_t n_blocks = (n_samples + block_size - 1) / block_size;
  std::vector<std::size_t> block_order(n_blocks);
  std::iota(block_order.begin(), block_order.end(), std::size_t{0});
  SeededRng rng(seed);
  rng.shuffle(block_order);

  std::vector<std::size_t> stream;
  stream.reserve(n_samples);
  for (const std::size_t b : block_order) {
    const std::size_t lo = b * block_size;
    const std::size_t hi = std::min(lo + block_size, n_samples);
    for (std::size_t i = lo; i < hi; ++i) stream.push_back(i);
  }

  SplitIndices out;
  out.train.assign(stream.begin(), stream.begin() + n_train);
  out.validation.assign(stream.begin() + n_train,
                        stream.begin() + n_train + n_val);
  out.test.assign(stream.begin() + n_train + n_val, stream.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
kfold_splits(std::span<const std::size_t> train_indices, int k,
             std::uint64_t seed) {
  const std::size_t n = train_indices.size();
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    raise(ErrorCode::bad_k,
          "k=" + std::to_string(k) + " with " + std::to_string(n) + " samples");
  }

  std::vector<std::size_t> order(train_indices.begin(), train_indices.end());
  SeededRng rng(seed);
  rng.shuffle(order);

  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
      folds;
  folds.reserve(static_cast<std::size_t>(k));
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t start = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t len = base + (static_cast<std::size_t>(f) < extra);
    std::vector<std::size_t> holdout(order.begin() + start,
                                     order.begin() + start + len);
    std::vector<std::size_t> fit;
    fit.reserve(n - len);
    fit.insert(fit.end(), order.begin(), order.begin() + start);
    fit.insert(fit.end(), order.begin() + start + len, order.end());
    std::sort(holdout.begin(), holdout.end());
    std::sort(fit.begin(), fit.end());
    folds.emplace_back(std::move(fit), std::move(holdout));
    start += len;
  }
  return folds;
}

Eigen::VectorXd persistence_forecast(const SupervisedSet& set) {
  if (set.size() == 0) raise(ErrorCode::empty_set, "no samples to forecast");
  return set.inputs.row(set.lag - 1).transpose();
}

ForecastData assemble_dataset(const TimeSeries& series, int lag, int horizon,
                              const SplitFractions& fractions,
                              std::size_t block_size, std::uint64_t seed) {
  const SupervisedSet all = make_windows(series, lag, horizon);
  const SplitIndices idx =
      block_split(all.size(), fractions, block_size, seed);

  ForecastData data;
  data.train = all.subset(idx.train);
  data.validation = all.subset(idx.validation);
  data.test = all.subset(idx.test);

  // Fit the scaler on everything the training partition sees (inputs and
  // targets), then apply it to all three partitions.
  std::vector<double> train_values;
  train_values.reserve(data.train.size() * (static_cast<std::size_t>(lag) + 1));
  for (Eigen::Index j = 0; j < data.train.targets.size(); ++j) {
    for (Eigen::Index t = 0; t < data.train.inputs.rows(); ++t) {
      train_values.push_back(data.train.inputs(t, j));
    }
    train_values.push_back(data.train.targets(j));
  }
  const NormalizationParams norm = fit_minmax(train_values);

  for (SupervisedSet* set : {&data.train, &data.validation, &data.test}) {
    set->inputs = (set->inputs.array() - norm.shift) / norm.scale;
    set->targets = (set->targets.array() - norm.shift) / norm.scale;
    set->norm = norm;
  }
  return data;
}

}  // namespace windcast
