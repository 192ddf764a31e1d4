// Release acceptance harness. Each criterion below runs as an isolated,
// seeded check and prints one [PASS]/[FAIL] line; the exit status is the
// number of failed criteria. Run a single criterion by passing its name.
//
// Checks that validate numeric results use independent inline oracles
// (brute-force loops, finite differences, frozen reference values) rather
// than the library functions under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "windcast/cmaes.hpp"
#include "windcast/dataset.hpp"
#include "windcast/errors.hpp"
#include "windcast/experiment.hpp"
#include "windcast/lstm.hpp"
#include "windcast/metrics.hpp"
#include "windcast/rng.hpp"
#include "windcast/synth.hpp"
#include "windcast/train.hpp"
#include "windcast/tuner.hpp"

using namespace windcast;

namespace {

struct Checker {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& detail) {
    if (!ok) failures.push_back(detail);
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

double median5(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---------------------------------------------------------------------------
// Criterion: metric oracle equivalence

void check_metric_oracle(Checker& ck) {
  SeededRng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + rng.below(491);
    std::vector<double> pred(n), obs(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng.uniform(0.5, 20.0);
      obs[i] = rng.uniform(0.5, 20.0);
    }

    // brute-force oracle
    double se = 0.0, ae = 0.0, ape = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = pred[i] - obs[i];
      se += d * d;
      ae += std::abs(d);
      ape += std::abs(d) / std::abs(obs[i]);
    }
    const double nd = static_cast<double>(n);
    const double mse_oracle = se / nd;
    const double rmse_oracle = std::sqrt(se / nd);
    const double mae_oracle = ae / nd;
    const double mape_oracle = 100.0 * ape / nd;
    double mp = 0.0, mo = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mp += pred[i];
      mo += obs[i];
    }
    mp /= nd;
    mo /= nd;
    double cov = 0.0, vp = 0.0, vo = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cov += (pred[i] - mp) * (obs[i] - mo);
      vp += (pred[i] - mp) * (pred[i] - mp);
      vo += (obs[i] - mo) * (obs[i] - mo);
    }
    const double r_oracle = cov / std::sqrt(vp * vo);

    const std::string tag = " (trial " + std::to_string(trial) + ")";
    ck.expect(std::abs(mse(pred, obs) - mse_oracle) <= 1e-10, "mse" + tag);
    ck.expect(std::abs(rmse(pred, obs) - rmse_oracle) <= 1e-10, "rmse" + tag);
    ck.expect(std::abs(mae(pred, obs) - mae_oracle) <= 1e-10, "mae" + tag);
    ck.expect(std::abs(mape(pred, obs) - mape_oracle) <= 1e-10, "mape" + tag);
    ck.expect(std::abs(pearson_r(pred, obs) - r_oracle) <= 1e-10,
              "pearson_r" + tag);
  }
}

// ---------------------------------------------------------------------------
// Criterion: gradient correctness (analytic vs central finite differences)

double fd_loss(LstmNetwork& net, const Eigen::VectorXd& params,
               const Eigen::MatrixXd& windows, const Eigen::VectorXd& targets) {
  net.unflatten(params);
  return loss_mse(predict(net, windows), targets);
}

void check_gradients_for(Checker& ck, const std::vector<int>& units,
                         std::uint64_t seed, const std::string& label) {
  LstmNetwork net = make_network(1, units, seed);
  SeededRng rng(seed + 17);
  Eigen::MatrixXd windows(3, 4);
  Eigen::VectorXd targets(4);
  for (int j = 0; j < 4; ++j) {
    for (int t = 0; t < 3; ++t) windows(t, j) = rng.uniform(-1.0, 1.0);
    targets(j) = rng.uniform(-1.0, 1.0);
  }

  const Eigen::VectorXd analytic = backward_bptt(net, windows, targets);
  const Eigen::VectorXd theta = net.flatten();
  const double h = 1e-5;
  LstmNetwork scratch = net;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd p = theta;
    p(k) = theta(k) + h;
    const double up = fd_loss(scratch, p, windows, targets);
    p(k) = theta(k) - h;
    const double down = fd_loss(scratch, p, windows, targets);
    const double fd = (up - down) / (2.0 * h);
    // Central differences at h=1e-5 have an absolute noise floor near 1e-12
    // from double-precision cancellation; components below ~1e-6 are checked
    // in absolute terms via the denominator floor.
    const double rel = std::abs(analytic(k) - fd) /
                       std::max({std::abs(analytic(k)), std::abs(fd), 1e-6});
    worst = std::max(worst, rel);
  }
  ck.expect(worst < 1e-5, label + ": worst relative gradient error " +
                              fmt(worst) + " >= 1e-5");
}

void check_gradient_correctness(Checker& ck) {
  check_gradients_for(ck, {2}, 99, "1-layer");
  check_gradients_for(ck, {2, 2}, 100, "2-layer");
}

// ---------------------------------------------------------------------------
// Criterion: LSTM closed-form behavior

void check_lstm_closed_form(Checker& ck) {
  // zero-weight network: every gate sits at sigmoid(0), the candidate at
  // tanh(0) = 0, so the cell never moves and the head bias is the output
  LstmNetwork net = make_network(1, std::vector<int>{3}, 1);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(net.parameter_count()));
  zero(zero.size() - 1) = 0.3;  // head bias is the last flattened entry
  net.unflatten(zero);

  SeededRng rng(5);
  Eigen::MatrixXd windows(3, 10);
  for (int j = 0; j < 10; ++j) {
    for (int t = 0; t < 3; ++t) windows(t, j) = rng.uniform(-10.0, 10.0);
  }
  const Eigen::VectorXd out = predict(net, windows);
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    ck.expect(out(j) == 0.3, "zero-weight prediction " + fmt(out(j)) +
                                 " != head bias (sample " +
                                 std::to_string(j) + ")");
  }
  const double single = sequence_forward(net, std::vector<double>{1.0, -2.0, 3.0});
  ck.expect(single == 0.3, "sequence output != head bias");

  // with all weights zero the forget and input gates are exactly 0.5 and the
  // candidate is zero, so each step halves the cell state bit for bit
  const LstmLayer layer = LstmLayer::zeros(1, 3);
  Eigen::MatrixXd c0(3, 2);
  c0 << 1.0, -0.75, 0.5, 2.0, -1.25, 0.125;
  LstmState state{c0, Eigen::MatrixXd::Zero(3, 2)};
  Eigen::MatrixXd expected = c0;
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 2);
  for (int t = 1; t <= 40; ++t) {
    state = cell_forward(layer, x, state);
    expected *= 0.5;
    ck.expect((state.c - expected).cwiseAbs().maxCoeff() == 0.0,
              "cell state deviates from exact halving at step " +
                  std::to_string(t));
  }
}

// ---------------------------------------------------------------------------
// Criterion: CMA-ES convergence on standard benchmarks

double sphere_fn(const Eigen::VectorXd& x) { return x.squaredNorm(); }

double rosenbrock_fn(const Eigen::VectorXd& x) {
  double f = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    f += 100.0 * std::pow(x(i + 1) - x(i) * x(i), 2) + std::pow(1.0 - x(i), 2);
  }
  return f;
}

void check_cmaes_benchmarks(Checker& ck) {
  int sphere_ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CmaesConfig cfg;
    cfg.dimension = 10;
    cfg.initial_mean = Eigen::VectorXd::Constant(10, 2.0);
    cfg.sigma0 = 2.0;
    cfg.lower = Eigen::VectorXd::Constant(10, -5.0);
    cfg.upper = Eigen::VectorXd::Constant(10, 5.0);
    cfg.max_evaluations = 50000;
    cfg.target_fitness = 1e-11;
    cfg.seed = seed;
    const MinimizeResult result = minimize(cfg, sphere_fn);
    if (result.best_fitness < 1e-10 && result.evaluations <= 50000) {
      ++sphere_ok;
    }
  }
  ck.expect(sphere_ok == 20, "sphere n=10: only " + std::to_string(sphere_ok) +
                                 "/20 seeds reached 1e-10 in 50k evaluations");

  int rosen_ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CmaesConfig cfg;
    cfg.dimension = 5;
    cfg.lambda = 16;  // larger population avoids the far basin more reliably
    cfg.initial_mean = Eigen::VectorXd::Zero(5);
    cfg.sigma0 = 2.0;
    cfg.lower = Eigen::VectorXd::Constant(5, -5.0);
    cfg.upper = Eigen::VectorXd::Constant(5, 10.0);
    cfg.max_evaluations = 100000;
    cfg.target_fitness = 1e-7;
    cfg.seed = seed;
    const MinimizeResult result = minimize(cfg, rosenbrock_fn);
    if (result.best_fitness < 1e-6 && result.evaluations <= 100000) {
      ++rosen_ok;
    }
  }
  ck.expect(rosen_ok >= 18, "rosenbrock n=5: only " +
                                std::to_string(rosen_ok) +
                                "/20 seeds reached 1e-6 in 100k evaluations");
}

// ---------------------------------------------------------------------------
// Criterion: every tuner candidate decodes inside the search box

ForecastData make_forecast_data(std::size_t n, double ar, double diurnal,
                                std::uint64_t series_seed,
                                std::uint64_t split_seed, int lag = 6,
                                int horizon = 1) {
  SynthParams params;
  params.ar_coeff = ar;
  params.diurnal_amplitude = diurnal;
  const TimeSeries series = synth_wind(n, 10, series_seed, params);
  return assemble_dataset(series, lag, horizon, SplitFractions{}, 144,
                          split_seed);
}

void check_tuner_bound_respect(Checker& ck) {
  const ForecastData data = make_forecast_data(2500, 0.9, 0.0, 501, 502);

  FitnessConfig fitness;
  fitness.epochs = 3;
  fitness.max_train_samples = 400;
  fitness.max_val_samples = 200;

  CmaesTuneConfig tune_cfg;
  tune_cfg.lambda = 12;
  tune_cfg.budget = 120;
  tune_cfg.seed = 2024;
  const TuneResult result = tune_cmaes(data, fitness, tune_cfg);

  ck.expect(result.ledger.size() == 120,
            "expected 120 ledger entries, got " +
                std::to_string(result.ledger.size()));
  for (const LedgerEntry& e : result.ledger) {
    const HyperParams& hp = e.hp;
    const bool ok = (hp.hidden_layers == 1 || hp.hidden_layers == 2) &&
                    hp.units[0] >= 30 && hp.units[0] <= 230 &&
                    hp.units[1] >= 30 && hp.units[1] <= 230 &&
                    hp.learning_rate >= 1e-5 && hp.learning_rate <= 1e-1 &&
                    hp.batch_size >= 8 && hp.batch_size <= 1024;
    ck.expect(ok, "candidate " + std::to_string(e.eval_index) +
                      " escaped the search box");
  }
}

// ---------------------------------------------------------------------------
// Criterion: the ledger decomposes as f = rmse + omega * max(0, t - rho)

void audit_ledger(Checker& ck, const std::vector<LedgerEntry>& ledger,
                  double omega, double rho, const std::string& label) {
  for (const LedgerEntry& e : ledger) {
    const double hinge = std::max(0.0, e.runtime_s - rho);
    ck.expect(e.penalty == hinge,
              label + ": penalty column mismatch at evaluation " +
                  std::to_string(e.eval_index));
    ck.expect(e.fitness == e.rmse + omega * hinge,
              label + ": fitness decomposition fails at evaluation " +
                  std::to_string(e.eval_index) + " (" + fmt(e.fitness) +
                  " vs " + fmt(e.rmse + omega * hinge) + ")");
  }
}

void check_fitness_decomposition(Checker& ck) {
  const ForecastData data = make_forecast_data(700, 0.9, 0.0, 601, 602);

  FitnessConfig fitness;  // omega = 1e-3, rho = 600 s defaults
  fitness.epochs = 1;
  fitness.max_train_samples = 100;
  fitness.max_val_samples = 50;

  CmaesTuneConfig tune_cfg;
  tune_cfg.lambda = 12;
  tune_cfg.budget = 24;
  tune_cfg.seed = 31;

  const TuneResult idle = tune_cmaes(data, fitness, tune_cfg);
  audit_ledger(ck, idle.ledger, fitness.omega, fitness.rho, "idle-penalty");

  // a threshold below any real runtime makes every penalty strictly positive
  fitness.rho = 1e-3;
  const TuneResult active = tune_cmaes(data, fitness, tune_cfg);
  audit_ledger(ck, active.ledger, fitness.omega, fitness.rho, "live-penalty");
  bool any_positive = false;
  for (const LedgerEntry& e : active.ledger) any_positive |= e.penalty > 0.0;
  ck.expect(any_positive, "live-penalty run produced no positive penalties");

  // the audit must survive serialization
  const std::string path =
      (std::filesystem::temp_directory_path() / "windcast_accept_ledger.tsv")
          .string();
  write_ledger(path, active.ledger);
  audit_ledger(ck, read_ledger(path), fitness.omega, fitness.rho,
               "file round trip");
  std::filesystem::remove(path);
}

// ---------------------------------------------------------------------------
// Criterion: method ordering at desk scale
// (evolution-tuned <= grid-tuned <= persistence, and at least 5% better
// than persistence, on the median of five seeds)

// Final training deliberately repeats the exact protocol the searchers
// evaluated candidates under (same sample caps, same epochs), so the selected
// configuration is deployed on the objective it was chosen for. Three
// repetitions with independent seeds; the median damps single-run noise.
double test_rmse_of(const HyperParams& hp, const ForecastData& data,
                    std::uint64_t seed) {
  std::vector<double> reps;
  for (std::uint64_t k = 0; k < 3; ++k) {
    const std::uint64_t rep_seed = derive_seed(seed, "rep", k);
    LstmNetwork net =
        make_network(1, hp.units_vector(), derive_seed(rep_seed, "init"));
    const TrainResult trained =
        train(std::move(net), data.train.head(600), data.validation.head(300),
              hp, 15, rep_seed);
    reps.push_back(evaluation_rmse(trained.net, data.test));
  }
  std::sort(reps.begin(), reps.end());
  return reps[1];
}

double persistence_rmse_of(const ForecastData& data) {
  const Eigen::VectorXd pred_norm = persistence_forecast(data.test);
  double se = 0.0;
  for (Eigen::Index i = 0; i < pred_norm.size(); ++i) {
    const double pred = data.test.norm.denormalize(pred_norm(i));
    const double obs = data.test.norm.denormalize(data.test.targets(i));
    se += (pred - obs) * (pred - obs);
  }
  return std::sqrt(se / static_cast<double>(pred_norm.size()));
}

void check_method_ordering(Checker& ck) {
  std::vector<double> evo, grid_rmse, persist;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    // One-hour-ahead forecasting (horizon 6) of a strongly autocorrelated
    // series with a diurnal cycle: accuracy here genuinely depends on the
    // hyperparameters, so the searchers can be told apart.
    const ForecastData data =
        make_forecast_data(20000, 0.9, 3.0, derive_seed(4200, "series", s),
                           derive_seed(4200, "split", s), 12, 6);

    FitnessConfig fitness;
    fitness.epochs = 15;
    fitness.max_train_samples = 600;
    fitness.max_val_samples = 300;

    CmaesTuneConfig tune_cfg;
    tune_cfg.lambda = 12;
    tune_cfg.budget = 60;
    tune_cfg.seed = derive_seed(4200, "tune", s);
    const TuneResult evo_result = tune_cmaes(data, fitness, tune_cfg);

    // The exhaustive baseline sweeps learning rate and batch size on the
    // tool's documented example lattice; network structure stays fixed at
    // the stock two-layer configuration.
    GridSpec grid;
    grid.learning_rates = {1e-4, 1e-3, 1e-2};
    grid.batch_sizes = {128, 512, 1024};
    grid.base.hidden_layers = 2;
    grid.base.units = {125, 100};
    grid.base.optimizer = OptimizerKind::adam;
    const GridResult grid_result =
        tune_grid(data, fitness, grid, derive_seed(4200, "grid", s));

    evo.push_back(test_rmse_of(evo_result.best_hp, data,
                               derive_seed(4200, "retrain-evo", s)));
    grid_rmse.push_back(test_rmse_of(grid_result.result.best_hp, data,
                                     derive_seed(4200, "retrain-grid", s)));
    persist.push_back(persistence_rmse_of(data));
    std::printf("       method ordering seed %llu: tuned=%.4f grid=%.4f "
                "persistence=%.4f\n",
                static_cast<unsigned long long>(s), evo.back(),
                grid_rmse.back(), persist.back());
    std::fflush(stdout);
  }

  const double evo_med = median5(evo);
  const double grid_med = median5(grid_rmse);
  const double persist_med = median5(persist);
  std::printf("       method ordering medians: tuned=%.4f grid=%.4f "
              "persistence=%.4f\n",
              evo_med, grid_med, persist_med);
  std::fflush(stdout);

  ck.expect(evo_med <= grid_med,
            "tuned model (" + fmt(evo_med) + ") worse than grid baseline (" +
                fmt(grid_med) + ")");
  ck.expect(grid_med <= persist_med,
            "grid baseline (" + fmt(grid_med) + ") worse than persistence (" +
                fmt(persist_med) + ")");
  ck.expect(evo_med <= 0.95 * persist_med,
            "tuned model (" + fmt(evo_med) +
                ") not 5% better than persistence (" + fmt(persist_med) + ")");
}

// ---------------------------------------------------------------------------
// Criterion: the runtime penalty steers the search toward faster models

void check_penalty_ablation(Checker& ck) {
  int penalized_not_slower = 0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const ForecastData data =
        make_forecast_data(4000, 0.6, 0.0, derive_seed(77, "series", s),
                           derive_seed(77, "split", s));

    // Candidate trainings are sized so the slow side of the search space
    // overshoots the 5 s threshold and pays the penalty; the wide initial
    // step size spreads the first generation across the whole box, so both
    // arms sample slow candidates immediately and the penalized arm has a
    // gradient to steer by from the first selection on.
    FitnessConfig fitness;
    fitness.omega = 0.5;
    fitness.rho = 5.0;
    fitness.epochs = 10;
    fitness.max_train_samples = 1500;
    fitness.max_val_samples = 300;

    CmaesTuneConfig tune_cfg;
    tune_cfg.lambda = 12;
    tune_cfg.budget = 36;
    tune_cfg.sigma0 = 0.5;
    tune_cfg.seed = derive_seed(77, "tune", s);

    const AblationResult ablation =
        ablation_runtime_penalty(data, fitness, tune_cfg);
    if (ablation.with_stats.empty() || ablation.without_stats.empty()) {
      ck.expect(false, "ablation produced no generation statistics");
      return;
    }
    const double with_rt = ablation.with_stats.back().mean_runtime;
    const double without_rt = ablation.without_stats.back().mean_runtime;
    std::printf("       ablation seed %llu: penalized %.2fs vs "
                "unpenalized %.2fs per candidate\n",
                static_cast<unsigned long long>(s), with_rt, without_rt);
    std::fflush(stdout);
    if (with_rt <= without_rt) ++penalized_not_slower;
  }
  ck.expect(penalized_not_slower >= 3,
            "penalized arm was faster in only " +
                std::to_string(penalized_not_slower) + "/5 seeds");
}

// ---------------------------------------------------------------------------
// Criterion: tuning runs reproduce bit for bit (runtime columns excluded)

void check_reproducibility(Checker& ck) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "windcast_accept_repro";
  fs::remove_all(base);

  ExperimentConfig cfg;
  cfg.data.synth_n = 700;
  cfg.data.lag = 6;
  cfg.data.block = 24;
  cfg.model.hidden_layers = 1;
  cfg.model.units = {8, 8};
  cfg.model.batch_size = 64;
  cfg.model_epochs = 1;
  cfg.fitness.epochs = 1;
  cfg.fitness.max_train_samples = 100;
  cfg.fitness.max_val_samples = 50;
  cfg.tune.lambda = 12;
  cfg.tune.budget = 24;
  cfg.reps = 1;
  cfg.seed = 7;

  cfg.out_dir = (base / "a").string();
  cmd_tune(cfg);
  cfg.out_dir = (base / "b").string();
  cmd_tune(cfg);

  const std::vector<LedgerEntry> a = read_ledger((base / "a" / "ledger.tsv").string());
  const std::vector<LedgerEntry> b = read_ledger((base / "b" / "ledger.tsv").string());
  ck.expect(a.size() == 24, "expected 24 ledger entries, got " +
                                std::to_string(a.size()));
  ck.expect(a.size() == b.size(), "ledger sizes differ between runs");
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    const bool same = a[i].eval_index == b[i].eval_index &&
                      a[i].hp == b[i].hp && a[i].rmse == b[i].rmse &&
                      a[i].penalty == b[i].penalty &&
                      a[i].fitness == b[i].fitness && a[i].seed == b[i].seed;
    ck.expect(same, "ledger line " + std::to_string(i) +
                        " differs between identical runs");
  }
  fs::remove_all(base);
}

// ---------------------------------------------------------------------------
// Criterion: Friedman ranking against a frozen oracle

void check_friedman_correctness(Checker& ck) {
  // three models scored on four runs, lower is better; the reference ranks,
  // statistic, and p-value were computed by an independent implementation
  Eigen::MatrixXd scores(3, 4);
  scores << 0.70, 0.80, 0.60, 0.90,
            0.75, 0.80, 0.65, 0.85,
            0.90, 0.95, 0.55, 0.95;
  const FriedmanResult result = friedman_ranks(scores, true);
  const double oracle_ranks[3] = {1.625, 1.875, 2.5};
  ck.expect(result.mean_ranks.size() == 3, "expected 3 mean ranks");
  for (int m = 0; m < 3; ++m) {
    ck.expect(std::abs(result.mean_ranks[static_cast<std::size_t>(m)] -
                       oracle_ranks[m]) <= 1e-10,
              "mean rank of model " + std::to_string(m) + " is " +
                  fmt(result.mean_ranks[static_cast<std::size_t>(m)]) +
                  ", oracle says " + fmt(oracle_ranks[m]));
  }
  ck.expect(std::abs(result.chi_square - 1.625) <= 1e-10,
            "chi-square " + fmt(result.chi_square) + " != 1.625");
  ck.expect(result.dof == 2, "dof != 2");
  ck.expect(std::abs(result.p_value - 0.44374731008107987) <= 1e-10,
            "p-value " + fmt(result.p_value) + " off the oracle value");

  // a model that wins every run must carry mean rank exactly 1
  Eigen::MatrixXd dominant(3, 5);
  dominant << 0.1, 0.2, 0.15, 0.12, 0.18,
              0.5, 0.6, 0.55, 0.52, 0.58,
              0.9, 0.8, 0.85, 0.82, 0.88;
  const FriedmanResult dom = friedman_ranks(dominant, true);
  ck.expect(dom.mean_ranks[0] == 1.0,
            "dominant model mean rank " + fmt(dom.mean_ranks[0]) + " != 1.0");
  ck.expect(dom.mean_ranks[1] > 1.0 && dom.mean_ranks[2] > dom.mean_ranks[1],
            "dominated models not ordered");
  const double rank_sum =
      dom.mean_ranks[0] + dom.mean_ranks[1] + dom.mean_ranks[2];
  ck.expect(std::abs(rank_sum - 6.0) <= 1e-12,
            "mean ranks sum to " + fmt(rank_sum) + ", expected 6");
}

// ---------------------------------------------------------------------------

struct Criterion {
  std::string name;
  double time_limit_s;  // 0 = no stated bound
  std::function<void(Checker&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"metric_oracle", 1.0, check_metric_oracle},
      {"friedman_correctness", 1.0, check_friedman_correctness},
      {"lstm_closed_form", 1.0, check_lstm_closed_form},
      {"gradient_correctness", 10.0, check_gradient_correctness},
      {"cmaes_benchmarks", 120.0, check_cmaes_benchmarks},
      {"tuner_bound_respect", 0.0, check_tuner_bound_respect},
      {"fitness_decomposition", 0.0, check_fitness_decomposition},
      {"reproducibility", 0.0, check_reproducibility},
      {"method_ordering", 1800.0, check_method_ordering},
      {"penalty_ablation", 1800.0, check_penalty_ablation},
  };

  const std::string only = argc > 1 ? argv[1] : "";
  bool matched = false;
  int failures = 0;
  for (const Criterion& criterion : criteria) {
    if (!only.empty() && criterion.name != only) continue;
    matched = true;

    Checker ck;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criterion.run(ck);
    } catch (const std::exception& e) {
      ck.expect(false, std::string("unhandled exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (criterion.time_limit_s > 0.0 && seconds > criterion.time_limit_s) {
      ck.expect(false, "runtime " + fmt(seconds) + "s exceeds the " +
                           fmt(criterion.time_limit_s) + "s budget");
    }

    if (ck.failures.empty()) {
      std::printf("[PASS] %s (%.1fs)\n", criterion.name.c_str(), seconds);
    } else {
      std::string detail = ck.failures.front();
      if (ck.failures.size() > 1) {
        detail += " (+" + std::to_string(ck.failures.size() - 1) +
                  " more failures)";
      }
      std::printf("[FAIL] %s (%.1fs): %s\n", criterion.name.c_str(), seconds,
                  detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }

  if (!matched) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 1;
  }
  return failures;
}
