// Command-line front end: parses flags into an ExperimentConfig and calls
// the command cores in windcast/experiment.hpp.
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "windcast/errors.hpp"
#include "windcast/experiment.hpp"

namespace {

using windcast::ExperimentConfig;

int exit_code_for(const windcast::Error& err) {
  switch (err.category()) {
    case windcast::ErrorClass::config: return 2;
    case windcast::ErrorClass::data: return 3;
    case windcast::ErrorClass::runtime: return 4;
  }
  return 4;
}

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::string horizon;                 // 10min | 1h
};

// Applied before the typed flags so explicit flags win over the file.
void apply_common(ExperimentConfig& cfg, const CommonFlags& common) {
  if (!common.config_path.empty()) {
    windcast::apply_config_file(cfg, common.config_path);
  }
  for (const std::string& pair : common.overrides) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos) {
      windcast::raise(windcast::ErrorCode::bad_config,
                      "--set expects section.key=value, got '" + pair + "'");
    }
    windcast::apply_config_value(cfg, pair.substr(0, eq), pair.substr(eq + 1));
  }
  if (!common.horizon.empty()) {
    int minutes = 0;
    if (common.horizon == "10min") minutes = 10;
    else if (common.horizon == "1h") minutes = 60;
    else {
      windcast::raise(windcast::ErrorCode::bad_config,
                      "--horizon must be 10min or 1h");
    }
    if (cfg.data.step_minutes <= 0 || minutes % cfg.data.step_minutes != 0) {
      windcast::raise(windcast::ErrorCode::bad_config,
                      "--horizon " + common.horizon + " is not a whole number"
                      " of " + std::to_string(cfg.data.step_minutes) +
                      "-minute steps");
    }
    cfg.data.horizon_steps = minutes / cfg.data.step_minutes;
  }
}

void add_common_flags(CLI::App* cmd, ExperimentConfig& cfg,
                      CommonFlags& common) {
  cmd->add_option("--config", common.config_path,
                  "Config file (key = value with [section] headers)");
  cmd->add_option("--set", common.overrides,
                  "Override one config entry, e.g. --set tune.omega=0.01");
  cmd->add_option("--seed", cfg.seed, "Base seed for every derived RNG");
  cmd->add_option("--out", cfg.out_dir, "Output directory");
  cmd->add_option("--threads", cfg.threads,
                  "Worker threads for candidate evaluation (0 = auto)");
  cmd->add_option("--horizon", common.horizon,
                  "Forecast horizon: 10min or 1h")
      ->check(CLI::IsMember({"10min", "1h"}));
  cmd->add_option("--lag", cfg.data.lag,
                  "Input window length (0 = pick from horizon)");
}

void add_data_flags(CLI::App* cmd, ExperimentConfig& cfg) {
  auto* csv = cmd->add_option("--csv", cfg.data.csv_path,
                              "Read the series from this CSV instead of the "
                              "synthetic generator");
  csv->each([&cfg](const std::string&) {
    cfg.data.source = windcast::DataConfig::Source::csv;
  });
  cmd->add_option("--column", cfg.data.csv_column,
                  "Wind-speed column name in the CSV");
  cmd->add_option("--n", cfg.data.synth_n, "Synthetic series length");
}

void add_model_flags(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--layers", cfg.model.hidden_layers, "Hidden layers (1-2)");
  cmd->add_option("--units1", cfg.model.units[0], "Units in the first layer");
  cmd->add_option("--units2", cfg.model.units[1], "Units in the second layer");
  cmd->add_option("--lr", cfg.model.learning_rate, "Learning rate");
  cmd->add_option("--batch", cfg.model.batch_size, "Minibatch size");
  cmd->add_option_function<std::string>(
         "--optimizer",
         [&cfg](const std::string& name) {
           cfg.model.optimizer = windcast::optimizer_from_name(name);
         },
         "Optimizer: sgdm, adam, or rmsprop")
      ->check(CLI::IsMember({"sgdm", "adam", "rmsprop"}));
  cmd->add_option("--epochs", cfg.model_epochs, "Training epochs");
  cmd->add_option("--reps", cfg.reps, "Independent training repetitions");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind-speed forecasting: peephole LSTM training, CMA-ES and "
               "grid hyperparameter search, and forecast evaluation"};
  app.require_subcommand(1);

  ExperimentConfig synth_cfg, train_cfg, tune_cfg, grid_cfg, eval_cfg;
  CommonFlags synth_common, train_common, tune_common, grid_common,
      eval_common;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic wind-speed "
                                            "series and write it as CSV");
  add_common_flags(synth, synth_cfg, synth_common);
  std::string synth_out_csv;
  synth->add_option("--n", synth_cfg.data.synth_n, "Series length");
  synth->add_option("--step-minutes", synth_cfg.data.step_minutes,
                    "Sampling step in minutes");
  synth->add_option("--shape", synth_cfg.data.synth.weibull_shape,
                    "Weibull shape of the marginal speed distribution");
  synth->add_option("--scale", synth_cfg.data.synth.weibull_scale,
                    "Weibull scale (m/s)");
  synth->add_option("--ar", synth_cfg.data.synth.ar_coeff,
                    "Lag-1 autocorrelation of the latent process");
  synth->add_option("--diurnal", synth_cfg.data.synth.diurnal_amplitude,
                    "Amplitude of the daily cycle (m/s)");
  synth->add_option("--floor", synth_cfg.data.synth.floor,
                    "Lower clamp on the speed (m/s)");
  synth->add_option("--csv", synth_out_csv, "Output CSV path");

  // train
  auto* train = app.add_subcommand(
      "train", "Train the forecaster with fixed hyperparameters");
  add_common_flags(train, train_cfg, train_common);
  add_data_flags(train, train_cfg);
  add_model_flags(train, train_cfg);

  // tune
  auto* tune = app.add_subcommand(
      "tune", "Search hyperparameters with CMA-ES, then retrain the best");
  add_common_flags(tune, tune_cfg, tune_common);
  add_data_flags(tune, tune_cfg);
  tune->add_option("--budget", tune_cfg.tune.budget,
                   "Total candidate evaluations");
  tune->add_option("--population", tune_cfg.tune.lambda,
                   "Candidates per generation");
  tune->add_option("--sigma0", tune_cfg.tune.sigma0,
                   "Initial step size on the unit cube");
  tune->add_option("--omega", tune_cfg.fitness.omega,
                   "Runtime-penalty weight");
  tune->add_option("--rho", tune_cfg.fitness.rho,
                   "Penalty-free runtime threshold (seconds)");
  tune->add_option("--tune-epochs", tune_cfg.fitness.epochs,
                   "Epochs per candidate evaluation");
  tune->add_option("--tune-reps", tune_cfg.fitness.repetitions,
                   "Training repetitions averaged per candidate");
  tune->add_option("--max-train", tune_cfg.fitness.max_train_samples,
                   "Cap on training samples per candidate (0 = all)");
  tune->add_option("--max-val", tune_cfg.fitness.max_val_samples,
                   "Cap on validation samples per candidate (0 = all)");
  tune->add_option("--epochs", tune_cfg.model_epochs,
                   "Epochs for the final retraining");
  tune->add_option("--reps", tune_cfg.reps,
                   "Repetitions for the final retraining");
  tune->add_flag("--ablation", tune_cfg.tune_ablation,
                 "Run the search twice (with and without the runtime "
                 "penalty) and write per-generation search statistics "
                 "instead of retraining");

  // grid
  auto* grid = app.add_subcommand(
      "grid", "Exhaustive learning-rate x batch-size search, then retrain");
  add_common_flags(grid, grid_cfg, grid_common);
  add_data_flags(grid, grid_cfg);
  std::string grid_lrs, grid_batches;
  grid->add_option("--lrs", grid_lrs,
                   "Comma-separated learning rates, e.g. 1e-4,1e-3,1e-2");
  grid->add_option("--batches", grid_batches,
                   "Comma-separated batch sizes, e.g. 128,512,1024");
  grid->add_option("--tune-epochs", grid_cfg.fitness.epochs,
                   "Epochs per grid point");
  grid->add_option("--max-train", grid_cfg.fitness.max_train_samples,
                   "Cap on training samples per grid point (0 = all)");
  grid->add_option("--max-val", grid_cfg.fitness.max_val_samples,
                   "Cap on validation samples per grid point (0 = all)");
  grid->add_option("--epochs", grid_cfg.model_epochs,
                   "Epochs for the final retraining");
  grid->add_option("--reps", grid_cfg.reps,
                   "Repetitions for the final retraining");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score a saved checkpoint on the held-out partition");
  add_common_flags(evaluate, eval_cfg, eval_common);
  add_data_flags(evaluate, eval_cfg);
  std::string checkpoint_path;
  evaluate->add_option("--checkpoint", checkpoint_path, "Checkpoint file")
      ->required();

  // compare
  auto* compare = app.add_subcommand(
      "compare", "Friedman rank test across run summaries");
  std::vector<std::string> summary_paths;
  std::string compare_out = "out";
  compare->add_option("summaries", summary_paths,
                      "summary.tsv files, one per model")
      ->expected(-2);
  compare->add_option("--out", compare_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      apply_common(synth_cfg, synth_common);
      const std::string path = windcast::cmd_synth(synth_cfg, synth_out_csv);
      std::cout << "wrote " << path << "\n";
    } else if (train->parsed()) {
      apply_common(train_cfg, train_common);
      const windcast::RunSummary summary = windcast::cmd_train(train_cfg);
      const windcast::ReportAggregates agg =
          windcast::aggregate_reports(summary.test_reports);
      std::cout << "test rmse mean " << agg.mean.rmse << " over "
                << summary.test_reports.size() << " repetitions; outputs in "
                << train_cfg.out_dir << "\n";
    } else if (tune->parsed()) {
      apply_common(tune_cfg, tune_common);
      const windcast::TuneResult result = windcast::cmd_tune(tune_cfg);
      std::cout << "best fitness " << result.best_fitness
                << " at evaluation " << result.best_index << "; outputs in "
                << tune_cfg.out_dir << "\n";
    } else if (grid->parsed()) {
      apply_common(grid_cfg, grid_common);
      if (!grid_lrs.empty()) {
        windcast::apply_config_value(grid_cfg, "grid.learning_rates",
                                     grid_lrs);
      }
      if (!grid_batches.empty()) {
        windcast::apply_config_value(grid_cfg, "grid.batch_sizes",
                                     grid_batches);
      }
      const windcast::GridResult result = windcast::cmd_grid(grid_cfg);
      std::cout << "best fitness " << result.result.best_fitness
                << " over " << result.surface.size() << " grid points; "
                << "outputs in " << grid_cfg.out_dir << "\n";
    } else if (evaluate->parsed()) {
      apply_common(eval_cfg, eval_common);
      windcast::cmd_evaluate(eval_cfg, checkpoint_path);
      std::cout << "reports in " << eval_cfg.out_dir << "\n";
    } else if (compare->parsed()) {
      const auto results = windcast::cmd_compare(summary_paths, compare_out);
      for (const auto& [metric, fr] : results) {
        std::cout << metric << ": chi2 " << fr.chi_square << ", p "
                  << fr.p_value << "\n";
      }
    }
  } catch (const windcast::Error& err) {
    std::cerr << err.what() << "\n";
    return exit_code_for(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 4;
  }
  return 0;
}
