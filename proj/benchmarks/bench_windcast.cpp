#include <benchmark/benchmark.h>

#include <vector>

#include "windcast/cmaes.hpp"
#include "windcast/lstm.hpp"
#include "windcast/metrics.hpp"
#include "windcast/rng.hpp"
#include "windcast/synth.hpp"

namespace {

using namespace windcast;

Eigen::MatrixXd random_windows(int lag, int batch, std::uint64_t seed) {
  SeededRng rng(seed);
  Eigen::MatrixXd w(lag, batch);
  for (Eigen::Index c = 0; c < batch; ++c) {
    for (Eigen::Index r = 0; r < lag; ++r) w(r, c) = rng.uniform(0.0, 1.0);
  }
  return w;
}

Eigen::VectorXd random_targets(int batch, std::uint64_t seed) {
  SeededRng rng(seed);
  Eigen::VectorXd t(batch);
  for (Eigen::Index i = 0; i < batch; ++i) t(i) = rng.uniform(0.0, 1.0);
  return t;
}

void bm_lstm_forward(benchmark::State& state) {
  const int units = static_cast<int>(state.range(0));
  const int batch = static_cast<int>(state.range(1));
  const LstmNetwork net =
      make_network(1, std::vector<int>{units, units}, 11);
  const Eigen::MatrixXd windows = random_windows(6, batch, 21);
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict(net, windows));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(bm_lstm_forward)
    ->Args({64, 128})
    ->Args({64, 512})
    ->Args({128, 512})
    ->Args({230, 512});

void bm_lstm_backward(benchmark::State& state) {
  const int units = static_cast<int>(state.range(0));
  const int batch = static_cast<int>(state.range(1));
  const LstmNetwork net =
      make_network(1, std::vector<int>{units, units}, 11);
  const Eigen::MatrixXd windows = random_windows(6, batch, 21);
  const Eigen::VectorXd targets = random_targets(batch, 22);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward_bptt(net, windows, targets));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(bm_lstm_backward)
    ->Args({64, 128})
    ->Args({64, 512})
    ->Args({128, 512});

void bm_cmaes_generation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CmaesConfig cfg;
  cfg.dimension = n;
  cfg.lambda = 12;
  cfg.initial_mean = Eigen::VectorXd::Zero(n);
  cfg.sigma0 = 0.3;
  cfg.lower = Eigen::VectorXd::Constant(n, -5.0);
  cfg.upper = Eigen::VectorXd::Constant(n, 5.0);
  cfg.max_evaluations = 1L << 60;
  cfg.seed = 5;
  Cmaes es(cfg);
  for (auto _ : state) {
    std::vector<Candidate> pop = es.ask();
    for (Candidate& c : pop) c.fitness = c.genome.squaredNorm();
    es.tell(pop);
  }
  state.SetItemsProcessed(state.iterations() * 12);
}
BENCHMARK(bm_cmaes_generation)->Arg(6)->Arg(10)->Arg(40);

void bm_metric_suite(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::VectorXd pred = random_targets(n, 7).array() + 3.0;
  const Eigen::VectorXd obs = random_targets(n, 8).array() + 3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(as_span(pred), as_span(obs)));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_metric_suite)->Arg(1000)->Arg(100000);

void bm_synth_wind(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth_wind(n, 10, 33));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(bm_synth_wind)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
