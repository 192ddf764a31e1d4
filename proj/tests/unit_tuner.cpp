#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "windcast/dataset.hpp"
#include "windcast/errors.hpp"
#include "windcast/rng.hpp"
#include "windcast/synth.hpp"
#include "windcast/tuner.hpp"

using namespace windcast;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::bad_params;
}

ForecastData tiny_data() {
  const TimeSeries series = synth_wind(600, 10, 4242);
  return assemble_dataset(series, 6, 1, SplitFractions{}, 24, 99);
}

FitnessConfig quick_fitness() {
  FitnessConfig cfg;
  cfg.epochs = 2;
  cfg.max_train_samples = 100;
  cfg.max_val_samples = 50;
  return cfg;
}

HyperParams small_hp() {
  HyperParams hp;
  hp.hidden_layers = 1;
  hp.units = {8, 8};
  hp.learning_rate = 1e-2;
  hp.batch_size = 32;
  hp.optimizer = OptimizerKind::adam;
  return hp;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Eigen::VectorXd genome_of(double layers, double u1, double u2, double log_lr,
                          double batch, double op) {
  Eigen::VectorXd g(6);
  g << layers, u1, u2, log_lr, batch, op;
  return g;
}

}  // namespace

TEST_CASE("genotype box matches the search bounds") {
  const Eigen::VectorXd lo = Genotype::lower();
  const Eigen::VectorXd hi = Genotype::upper();
  REQUIRE(lo.size() == 6);
  CHECK(lo(0) == 1.0);
  CHECK(hi(0) == 2.0);
  CHECK(lo(1) == 30.0);
  CHECK(hi(1) == 230.0);
  CHECK(lo(2) == 30.0);
  CHECK(hi(2) == 230.0);
  CHECK(lo(3) == -5.0);
  CHECK(hi(3) == -1.0);
  CHECK(lo(4) == 8.0);
  CHECK(hi(4) == 1024.0);
  CHECK(lo(5) == 0.0);
  CHECK(hi(5) == 3.0);

  const Eigen::VectorXd mid =
      Genotype::unit_to_natural(Eigen::VectorXd::Constant(6, 0.5));
  CHECK((mid - 0.5 * (lo + hi)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((Genotype::unit_to_natural(Eigen::VectorXd::Zero(6)) - lo)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((Genotype::unit_to_natural(Eigen::VectorXd::Ones(6)) - hi)
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("decoding the lower corner") {
  const HyperParams hp = decode_genome(genome_of(1, 30, 30, -5, 8, 0));
  CHECK(hp.hidden_layers == 1);
  CHECK(hp.units[0] == 30);
  CHECK(hp.units[1] == 30);
  CHECK(hp.learning_rate == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(hp.batch_size == 8);
  CHECK(hp.optimizer == OptimizerKind::sgdm);
}

TEST_CASE("decoding rounds and maps optimizer bins") {
  const HyperParams hp = decode_genome(genome_of(1.6, 176.5, 150.9, -3, 654.7, 1.2));
  CHECK(hp.hidden_layers == 2);
  CHECK(hp.units[0] == 177);  // lround half away from zero
  CHECK(hp.units[1] == 151);
  CHECK(hp.batch_size == 655);
  CHECK(hp.optimizer == OptimizerKind::adam);

  CHECK(decode_genome(genome_of(1, 30, 30, -3, 8, 0.99)).optimizer ==
        OptimizerKind::sgdm);
  CHECK(decode_genome(genome_of(1, 30, 30, -3, 8, 2.0)).optimizer ==
        OptimizerKind::rmsprop);
  CHECK(decode_genome(genome_of(1, 30, 30, -3, 8, 3.0)).optimizer ==
        OptimizerKind::rmsprop);
}

TEST_CASE("encode then decode returns the hyperparameters") {
  HyperParams hp;
  hp.hidden_layers = 2;
  hp.units = {177, 151};
  hp.learning_rate = 1e-3;
  hp.batch_size = 655;
  hp.optimizer = OptimizerKind::adam;

  const HyperParams back = decode_genome(encode_hyperparams(hp));
  CHECK(back.hidden_layers == hp.hidden_layers);
  CHECK(back.units[0] == hp.units[0]);
  CHECK(back.units[1] == hp.units[1]);
  CHECK(back.learning_rate == doctest::Approx(hp.learning_rate).epsilon(1e-12));
  CHECK(back.batch_size == hp.batch_size);
  CHECK(back.optimizer == hp.optimizer);
}

TEST_CASE("random round trips preserve every coordinate") {
  SeededRng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    HyperParams hp;
    hp.hidden_layers = 1 + static_cast<int>(rng.uniform() * 2.0);
    hp.hidden_layers = std::min(hp.hidden_layers, 2);
    hp.units[0] = 30 + static_cast<int>(rng.uniform() * 201.0);
    hp.units[1] = 30 + static_cast<int>(rng.uniform() * 201.0);
    hp.learning_rate = std::pow(10.0, -5.0 + 4.0 * rng.uniform());
    hp.batch_size = 8 + static_cast<int>(rng.uniform() * 1017.0);
    hp.batch_size = std::min(hp.batch_size, 1024);
    const double op = rng.uniform() * 3.0;
    hp.optimizer = op < 1.0   ? OptimizerKind::sgdm
                   : op < 2.0 ? OptimizerKind::adam
                              : OptimizerKind::rmsprop;

    const HyperParams back = decode_genome(encode_hyperparams(hp));
    CHECK(back.hidden_layers == hp.hidden_layers);
    CHECK(back.units[0] == hp.units[0]);
    CHECK(back.units[1] == hp.units[1]);
    CHECK(std::abs(back.learning_rate - hp.learning_rate) <=
          1e-12 * hp.learning_rate);
    CHECK(back.batch_size == hp.batch_size);
    CHECK(back.optimizer == hp.optimizer);
  }
}

TEST_CASE("out-of-range genomes are rejected, tolerant of float fuzz") {
  CHECK(code_of([] { decode_genome(genome_of(1, 250, 30, -3, 8, 0)); }) ==
        ErrorCode::out_of_range_genome);
  CHECK(code_of([] { decode_genome(genome_of(1, 30, 30, -6, 8, 0)); }) ==
        ErrorCode::out_of_range_genome);
  CHECK(code_of([] {
          decode_genome(genome_of(1, 30, std::nan(""), -3, 8, 0));
        }) == ErrorCode::out_of_range_genome);
  CHECK(code_of([] { decode_genome(Eigen::VectorXd::Zero(5)); }) ==
        ErrorCode::out_of_range_genome);

  // within the repair tolerance: clips instead of failing
  const HyperParams hp = decode_genome(genome_of(1, 230.0000005, 30, -3, 8, 0));
  CHECK(hp.units[0] == 230);
  const HyperParams hp2 = decode_genome(genome_of(1, 30, 30, -0.9999999, 8, 0));
  CHECK(hp2.learning_rate == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("search-box membership") {
  HyperParams hp = small_hp();
  hp.units = {125, 100};
  hp.learning_rate = 1e-3;
  hp.batch_size = 512;
  CHECK(within_search_bounds(hp));

  HyperParams low_batch = hp;
  low_batch.batch_size = 4;
  CHECK(!within_search_bounds(low_batch));

  HyperParams hot_lr = hp;
  hot_lr.learning_rate = 0.5;
  CHECK(!within_search_bounds(hot_lr));

  HyperParams thin = hp;
  thin.units = {20, 100};
  CHECK(!within_search_bounds(thin));

  CHECK(code_of([&] { encode_hyperparams(thin); }) ==
        ErrorCode::out_of_range_genome);
}

TEST_CASE("runtime penalty hinge") {
  CHECK(runtime_penalty(650.0, 600.0) == 50.0);
  CHECK(runtime_penalty(600.0, 600.0) == 0.0);
  CHECK(runtime_penalty(100.0, 600.0) == 0.0);
  CHECK(runtime_penalty(0.0, 0.0) == 0.0);

  double last = -1.0;
  for (double t = 0.0; t <= 1200.0; t += 37.0) {
    const double p = runtime_penalty(t, 600.0);
    CHECK(p >= last);
    last = p;
  }
}

TEST_CASE("fitness composition") {
  FitnessConfig cfg;
  cfg.omega = 1e-3;
  cfg.rho = 600.0;
  CHECK(compose_fitness(0.70, 700.0, cfg) == doctest::Approx(0.80).epsilon(1e-15));
  CHECK(compose_fitness(0.70, 100.0, cfg) == 0.70);

  FitnessConfig free = cfg;
  free.omega = 0.0;
  CHECK(compose_fitness(0.4321, 5000.0, free) == 0.4321);
}

TEST_CASE("fitness config validation") {
  FitnessConfig cfg;
  cfg.omega = -1.0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::bad_params);
  cfg = FitnessConfig{};
  cfg.rho = -5.0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::bad_params);
  cfg = FitnessConfig{};
  cfg.epochs = 0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::bad_params);
  cfg = FitnessConfig{};
  cfg.repetitions = 0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::bad_params);
}

TEST_CASE("fitness evaluation is deterministic in seed and index") {
  const ForecastData data = tiny_data();
  const FitnessConfig cfg = quick_fitness();
  const HyperParams hp = small_hp();

  const FitnessEvaluation a = evaluate_fitness(hp, data, cfg, 777, 3);
  const FitnessEvaluation b = evaluate_fitness(hp, data, cfg, 777, 3);
  CHECK(!a.diverged);
  CHECK(a.entry.rmse == b.entry.rmse);
  CHECK(a.entry.fitness == b.entry.fitness);
  CHECK(a.entry.penalty == b.entry.penalty);
  CHECK(a.entry.seed == 777);
  CHECK(a.entry.eval_index == 3);
  CHECK(a.entry.hp == hp);
  CHECK(a.entry.rmse > 0.0);

  const FitnessEvaluation c = evaluate_fitness(hp, data, cfg, 778, 3);
  CHECK(c.entry.rmse != a.entry.rmse);
}

TEST_CASE("fitness equals rmse when the penalty is disabled") {
  const ForecastData data = tiny_data();
  FitnessConfig cfg = quick_fitness();
  cfg.omega = 0.0;
  const FitnessEvaluation eval =
      evaluate_fitness(small_hp(), data, cfg, 12, 0);
  CHECK(eval.entry.fitness == eval.entry.rmse);
  CHECK(eval.entry.penalty == runtime_penalty(eval.entry.runtime_s, cfg.rho));
}

TEST_CASE("penalty and fitness decompose from the ledger columns") {
  const ForecastData data = tiny_data();
  FitnessConfig cfg = quick_fitness();
  cfg.omega = 0.05;
  cfg.rho = 1e-9;  // all wall-clock time is penalized
  const FitnessEvaluation eval =
      evaluate_fitness(small_hp(), data, cfg, 5, 0);
  CHECK(eval.entry.penalty == runtime_penalty(eval.entry.runtime_s, cfg.rho));
  CHECK(eval.entry.fitness ==
        compose_fitness(eval.entry.rmse, eval.entry.runtime_s, cfg));
  CHECK(eval.entry.penalty > 0.0);
  CHECK(eval.entry.fitness > eval.entry.rmse);
}

TEST_CASE("diverged training scores the sentinel but stays in the race") {
  const ForecastData data = tiny_data();
  const FitnessConfig cfg = quick_fitness();
  HyperParams hp = small_hp();
  hp.learning_rate = 1e3;  // far outside the tuner box, structurally legal
  hp.optimizer = OptimizerKind::sgdm;

  const FitnessEvaluation eval = evaluate_fitness(hp, data, cfg, 9, 0);
  CHECK(eval.diverged);
  CHECK(eval.entry.rmse == kDivergedRmse);
  CHECK(eval.entry.fitness ==
        compose_fitness(kDivergedRmse, eval.entry.runtime_s, cfg));
}

TEST_CASE("repetitions average the validation rmse") {
  const ForecastData data = tiny_data();
  FitnessConfig cfg = quick_fitness();
  cfg.repetitions = 2;
  const FitnessEvaluation avg =
      evaluate_fitness(small_hp(), data, cfg, 321, 0);

  FitnessConfig single = cfg;
  single.repetitions = 1;
  const FitnessEvaluation rep0 = evaluate_fitness(
      small_hp(), data, single, derive_seed(321, "fitness-rep", 0), 0);
  const FitnessEvaluation rep1 = evaluate_fitness(
      small_hp(), data, single, derive_seed(321, "fitness-rep", 1), 0);
  CHECK(avg.entry.rmse ==
        doctest::Approx(0.5 * (rep0.entry.rmse + rep1.entry.rmse))
            .epsilon(1e-15));
}

TEST_CASE("objective-driven tuning recovers a known optimum") {
  const HyperObjective objective = [](const HyperParams& hp) {
    const double lr_term = std::log10(hp.learning_rate) + 3.5;
    const double batch_term = (hp.batch_size - 500.0) / 1016.0;
    return lr_term * lr_term + batch_term * batch_term;
  };

  CmaesTuneConfig tune_cfg;
  tune_cfg.lambda = 12;
  tune_cfg.budget = 480;
  tune_cfg.seed = 11;
  const TuneResult result = tune_cmaes_objective(objective, tune_cfg);

  CHECK(result.ledger.size() == 480);
  CHECK(result.best_fitness < 1e-3);
  CHECK(std::abs(std::log10(result.best_hp.learning_rate) + 3.5) < 0.05);
  CHECK(std::abs(result.best_hp.batch_size - 500) <= 20);
}

TEST_CASE("every explored candidate respects the search box") {
  const HyperObjective objective = [](const HyperParams& hp) {
    return std::log10(hp.learning_rate) + hp.batch_size * 1e-4;
  };
  CmaesTuneConfig tune_cfg;
  tune_cfg.lambda = 12;
  tune_cfg.budget = 120;
  tune_cfg.seed = 2;
  const TuneResult result = tune_cmaes_objective(objective, tune_cfg);
  REQUIRE(result.ledger.size() == 120);
  for (const LedgerEntry& e : result.ledger) {
    CHECK(within_search_bounds(e.hp));
  }
}

TEST_CASE("ledger accounting and best tracking") {
  const HyperObjective objective = [](const HyperParams& hp) {
    return std::abs(std::log10(hp.learning_rate) + 2.0);
  };
  CmaesTuneConfig tune_cfg;
  tune_cfg.lambda = 12;
  tune_cfg.budget = 30;  // 12 + 12 + a 6-candidate tail
  tune_cfg.seed = 8;
  const TuneResult result = tune_cmaes_objective(objective, tune_cfg);

  REQUIRE(result.ledger.size() == 30);
  for (std::size_t i = 0; i < result.ledger.size(); ++i) {
    CHECK(result.ledger[i].eval_index == static_cast<long>(i));
  }
  double best = std::numeric_limits<double>::infinity();
  long best_index = -1;
  for (const LedgerEntry& e : result.ledger) {
    CHECK(e.fitness == e.rmse);  // no runtime in objective mode
    if (e.fitness < best) {
      best = e.fitness;
      best_index = e.eval_index;
    }
  }
  CHECK(result.best_fitness == best);
  CHECK(result.best_index == best_index);
  CHECK(result.best_hp ==
        result.ledger[static_cast<std::size_t>(best_index)].hp);
}

TEST_CASE("tuning run determinism") {
  const HyperObjective objective = [](const HyperParams& hp) {
    return std::abs(std::log10(hp.learning_rate) + 2.0) +
           std::abs(hp.units[0] - 100.0) / 200.0;
  };
  CmaesTuneConfig tune_cfg;
  tune_cfg.lambda = 12;
  tune_cfg.budget = 60;
  tune_cfg.seed = 5;
  const TuneResult a = tune_cmaes_objective(objective, tune_cfg);
  const TuneResult b = tune_cmaes_objective(objective, tune_cfg);
  REQUIRE(a.ledger.size() == b.ledger.size());
  for (std::size_t i = 0; i < a.ledger.size(); ++i) {
    CHECK(a.ledger[i].hp == b.ledger[i].hp);
    CHECK(a.ledger[i].fitness == b.ledger[i].fitness);
    CHECK(a.ledger[i].seed == b.ledger[i].seed);
  }

  tune_cfg.seed = 6;
  const TuneResult c = tune_cmaes_objective(objective, tune_cfg);
  bool any_different = false;
  for (std::size_t i = 0; i < a.ledger.size() && !any_different; ++i) {
    any_different = !(a.ledger[i].hp == c.ledger[i].hp);
  }
  CHECK(any_different);
}

TEST_CASE("empty budget and tiny population are rejected") {
  const HyperObjective objective = [](const HyperParams&) { return 1.0; };
  CmaesTuneConfig tune_cfg;
  tune_cfg.budget = 0;
  CHECK(code_of([&] { tune_cmaes_objective(objective, tune_cfg); }) ==
        ErrorCode::empty_budget);

  tune_cfg.budget = 10;
  tune_cfg.lambda = 1;
  CHECK(code_of([&] { tune_cmaes_objective(objective, tune_cfg); }) ==
        ErrorCode::bad_config);
}

TEST_CASE("non-finite objective values abort the run") {
  const HyperObjective objective = [](const HyperParams&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CmaesTuneConfig tune_cfg;
  tune_cfg.budget = 24;
  CHECK(code_of([&] { tune_cmaes_objective(objective, tune_cfg); }) ==
        ErrorCode::non_finite_fitness);
}

TEST_CASE("trace stream reports full generations only") {
  const HyperObjective objective = [](const HyperParams& hp) {
    return std::abs(std::log10(hp.learning_rate) + 2.0);
  };
  std::ostringstream trace;
  CmaesTuneConfig tune_cfg;
  tune_cfg.lambda = 12;
  tune_cfg.budget = 30;  // two full generations, one partial
  tune_cfg.seed = 3;
  tune_cfg.trace = &trace;
  tune_cmaes_objective(objective, tune_cfg);

  std::istringstream lines(trace.str());
  std::string line;
  long data_lines = 0;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.rfind("# ", 0) == 0) {
      header_seen = true;
      continue;
    }
    if (!line.empty()) ++data_lines;
  }
  CHECK(header_seen);
  CHECK(data_lines == 2);
}

TEST_CASE("grid sweep covers the grid in row-major order") {
  const ForecastData data = tiny_data();
  FitnessConfig cfg = quick_fitness();
  cfg.epochs = 1;
  cfg.max_train_samples = 80;
  cfg.max_val_samples = 40;

  GridSpec grid;
  grid.learning_rates = {1e-3, 1e-2};
  grid.batch_sizes = {16, 32, 64};
  grid.base = small_hp();

  const GridResult out = tune_grid(data, cfg, grid, 404);
  REQUIRE(out.result.ledger.size() == 6);
  REQUIRE(out.surface.size() == 6);

  for (std::size_t k = 0; k < 6; ++k) {
    const LedgerEntry& e = out.result.ledger[k];
    CHECK(e.eval_index == static_cast<long>(k));
    CHECK(e.hp.learning_rate == grid.learning_rates[k / 3]);
    CHECK(e.hp.batch_size == grid.batch_sizes[k % 3]);
    CHECK(e.hp.hidden_layers == grid.base.hidden_layers);
    CHECK(e.hp.units[0] == grid.base.units[0]);
    CHECK(e.hp.optimizer == grid.base.optimizer);

    const SurfaceRow& row = out.surface[k];
    CHECK(row.learning_rate == e.hp.learning_rate);
    CHECK(row.batch_size == e.hp.batch_size);
    CHECK(row.rmse == e.rmse);
    CHECK(std::isfinite(row.mean_test_rmse));
    CHECK(row.mean_test_rmse > 0.0);
    CHECK(out.result.best_fitness <= e.fitness);
  }
  const LedgerEntry& best =
      out.result.ledger[static_cast<std::size_t>(out.result.best_index)];
  CHECK(best.fitness == out.result.best_fitness);
  CHECK(best.hp == out.result.best_hp);
}

TEST_CASE("grid sweep is deterministic") {
  const ForecastData data = tiny_data();
  FitnessConfig cfg = quick_fitness();
  cfg.epochs = 1;
  cfg.max_train_samples = 80;
  cfg.max_val_samples = 40;
  GridSpec grid;
  grid.learning_rates = {1e-3};
  grid.batch_sizes = {16, 64};
  grid.base = small_hp();

  const GridResult a = tune_grid(data, cfg, grid, 404);
  const GridResult b = tune_grid(data, cfg, grid, 404);
  REQUIRE(a.result.ledger.size() == b.result.ledger.size());
  for (std::size_t k = 0; k < a.result.ledger.size(); ++k) {
    CHECK(a.result.ledger[k].rmse == b.result.ledger[k].rmse);
    CHECK(a.surface[k].mean_test_rmse == b.surface[k].mean_test_rmse);
  }
}

TEST_CASE("empty grids are rejected") {
  const ForecastData data = tiny_data();
  GridSpec grid;
  grid.batch_sizes = {16};
  grid.base = small_hp();
  CHECK(code_of([&] { tune_grid(data, quick_fitness(), grid, 1); }) ==
        ErrorCode::empty_grid);
}

TEST_CASE("per-generation arm statistics") {
  std::vector<LedgerEntry> ledger(7);
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    ledger[i].hp.batch_size = static_cast<int>(10 * (i + 1));
    ledger[i].hp.learning_rate = 1e-3;
    ledger[i].hp.units[0] = 50;
    ledger[i].runtime_s = 1.0;
    ledger[i].hp.optimizer =
        i % 2 == 0 ? OptimizerKind::adam : OptimizerKind::sgdm;
  }
  const std::vector<ArmGenerationStats> rows = per_generation_stats(ledger, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].generation == 0);
  CHECK(rows[0].mean_batch == doctest::Approx(20.0).epsilon(1e-15));
  CHECK(rows[0].n_adam == 2);
  CHECK(rows[0].n_sgdm == 1);
  CHECK(rows[1].mean_batch == doctest::Approx(50.0).epsilon(1e-15));
  CHECK(rows[2].generation == 2);
  CHECK(rows[2].mean_batch == doctest::Approx(70.0).epsilon(1e-15));
  CHECK(rows[2].n_adam + rows[2].n_sgdm + rows[2].n_rmsprop == 1);
  CHECK(rows[0].mean_lr == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(rows[0].mean_units1 == doctest::Approx(50.0).epsilon(1e-15));
  CHECK(rows[0].mean_runtime == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(code_of([&] { per_generation_stats(ledger, 0); }) ==
        ErrorCode::bad_params);
}

TEST_CASE("ablation arms share seeds and differ only in the penalty") {
  const ForecastData data = tiny_data();
  FitnessConfig cfg = quick_fitness();
  cfg.epochs = 1;
  cfg.max_train_samples = 60;
  cfg.max_val_samples = 30;
  // rho large: the penalty never actually fires, so both arms must make
  // identical decisions and produce identical rmse sequences.
  cfg.omega = 1e-3;
  cfg.rho = 1e6;

  CmaesTuneConfig tune_cfg;
  tune_cfg.lambda = 12;
  tune_cfg.budget = 24;
  tune_cfg.seed = 77;
  const AblationResult result = ablation_runtime_penalty(data, cfg, tune_cfg);

  REQUIRE(result.with_penalty.ledger.size() == 24);
  REQUIRE(result.without_penalty.ledger.size() == 24);
  for (std::size_t i = 0; i < 24; ++i) {
    const LedgerEntry& w = result.with_penalty.ledger[i];
    const LedgerEntry& wo = result.without_penalty.ledger[i];
    CHECK(w.hp == wo.hp);
    CHECK(w.rmse == wo.rmse);
    CHECK(w.seed == wo.seed);
    CHECK(w.penalty == 0.0);
    CHECK(w.fitness == w.rmse);
  }
  REQUIRE(result.with_stats.size() == 2);
  REQUIRE(result.without_stats.size() == 2);
  for (std::size_t g = 0; g < 2; ++g) {
    CHECK(result.with_stats[g].mean_lr == result.without_stats[g].mean_lr);
    CHECK(result.with_stats[g].mean_batch ==
          result.without_stats[g].mean_batch);
  }
}

TEST_CASE("ledger files round trip exactly") {
  const HyperObjective objective = [](const HyperParams& hp) {
    return std::abs(std::log10(hp.learning_rate) + 2.0);
  };
  CmaesTuneConfig tune_cfg;
  tune_cfg.lambda = 12;
  tune_cfg.budget = 24;
  tune_cfg.seed = 13;
  const TuneResult result = tune_cmaes_objective(objective, tune_cfg);

  const std::string path = temp_path("windcast_test_ledger.tsv");
  write_ledger(path, result.ledger);
  const std::vector<LedgerEntry> back = read_ledger(path);
  REQUIRE(back.size() == result.ledger.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].eval_index == result.ledger[i].eval_index);
    CHECK(back[i].hp == result.ledger[i].hp);
    CHECK(back[i].rmse == result.ledger[i].rmse);
    CHECK(back[i].runtime_s == result.ledger[i].runtime_s);
    CHECK(back[i].penalty == result.ledger[i].penalty);
    CHECK(back[i].fitness == result.ledger[i].fitness);
    CHECK(back[i].seed == result.ledger[i].seed);
  }
  std::remove(path.c_str());
}

TEST_CASE("ledger reader rejects malformed files") {
  CHECK(code_of([] { read_ledger("/nonexistent/ledger.tsv"); }) ==
        ErrorCode::file_not_found);

  const std::string path = temp_path("windcast_test_bad_ledger.tsv");
  {
    std::ofstream out(path);
    out << "wrong\theader\n";
  }
  CHECK(code_of([&] { read_ledger(path); }) == ErrorCode::malformed_row);
  std::remove(path.c_str());
}

TEST_CASE("best-config and surface files carry the expected keys") {
  TuneResult result;
  result.best_hp = small_hp();
  result.best_fitness = 0.75;
  result.best_index = 4;
  const std::string best_path = temp_path("windcast_test_best.kv");
  write_best_config(best_path, result);
  std::ifstream in(best_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("eval_index=4") != std::string::npos);
  CHECK(text.find("hidden_layers=1") != std::string::npos);
  CHECK(text.find("units1=8") != std::string::npos);
  CHECK(text.find("learning_rate=0.01") != std::string::npos);
  CHECK(text.find("batch_size=32") != std::string::npos);
  CHECK(text.find("optimizer=adam") != std::string::npos);
  CHECK(text.find("fitness=0.75") != std::string::npos);
  std::remove(best_path.c_str());

  SurfaceRow row;
  row.learning_rate = 1e-3;
  row.batch_size = 128;
  row.rmse = 0.5;
  row.mean_test_rmse = 0.6;
  row.mean_test_r = 0.9;
  const std::string surface_path = temp_path("windcast_test_surface.tsv");
  write_surface(surface_path, std::vector<SurfaceRow>{row});
  std::ifstream sin(surface_path);
  std::string header, data_line;
  std::getline(sin, header);
  std::getline(sin, data_line);
  CHECK(header == "L_R\tB_S\trmse\tmean_test_rmse\tmean_test_r");
  CHECK(data_line == "0.001\t128\t0.5\t0.6\t0.9");
  std::remove(surface_path.c_str());
}

TEST_CASE("ablation file lists both arms per generation") {
  AblationResult result;
  ArmGenerationStats g0;
  g0.generation = 0;
  g0.mean_batch = 100.0;
  g0.mean_lr = 1e-3;
  g0.mean_units1 = 60.0;
  g0.mean_runtime = 2.0;
  g0.n_adam = 12;
  result.with_stats = {g0};
  result.without_stats = {g0};

  const std::string path = temp_path("windcast_test_ablation.tsv");
  write_ablation(path, result);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "generation\tarm\tmean_batch\tmean_lr\tmean_units1\tmean_runtime_s\t"
        "n_sgdm\tn_adam\tn_rmsprop");
  std::getline(in, line);
  CHECK(line.find("penalized") != std::string::npos);
  std::getline(in, line);
  CHECK(line.find("unpenalized") != std::string::npos);
  std::remove(path.c_str());
}
