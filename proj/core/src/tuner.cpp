#include "windcast/tuner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "windcast/cmaes.hpp"
#include "windcast/csv.hpp"
#include "windcast/errors.hpp"
#include "windcast/parallel.hpp"
#include "windcast/rng.hpp"
#include "windcast/train.hpp"

namespace windcast {

Eigen::VectorXd Genotype::lower() {
  Eigen::VectorXd lo(dimension);
  lo << SearchBounds::min_layers, SearchBounds::min_units,
      SearchBounds::min_units, SearchBounds::min_log10_lr,
      SearchBounds::min_batch, 0.0;
  return lo;
}

Eigen::VectorXd Genotype::upper() {
  Eigen::VectorXd hi(dimension);
  hi << SearchBounds::max_layers, SearchBounds::max_units,
      SearchBounds::max_units, SearchBounds::max_log10_lr,
      SearchBounds::max_batch, 3.0;
  return hi;
}

Eigen::VectorXd Genotype::unit_to_natural(const Eigen::VectorXd& unit) {
  const Eigen::VectorXd lo = lower();
  const Eigen::VectorXd hi = upper();
  return lo.array() + unit.array() * (hi - lo).array();
}

namespace {

long round_clip(double x, long lo, long hi) {
  const long r = std::lround(x);
  return std::clamp(r, lo, hi);
}

}  // namespace

HyperParams decode_genome(const Eigen::VectorXd& genome) {
  if (genome.size() != Genotype::dimension) {
    raise(ErrorCode::out_of_range_genome,
          "genome has " + std::to_string(genome.size()) + " coordinates, need " +
              std::to_string(Genotype::dimension));
  }
  const Eigen::VectorXd lo = Genotype::lower();
  const Eigen::VectorXd hi = Genotype::upper();
  constexpr double tol = 1e-6;
  for (int i = 0; i < Genotype::dimension; ++i) {
    if (!std::isfinite(genome(i)) || genome(i) < lo(i) - tol ||
        genome(i) > hi(i) + tol) {
      raise(ErrorCode::out_of_range_genome,
            "coordinate " + std::to_string(i) + " = " +
                format_double(genome(i)) + " outside [" +
                format_double(lo(i)) + ", " + format_double(hi(i)) + "]");
    }
  }

  HyperParams hp;
  hp.hidden_layers = static_cast<int>(
      round_clip(genome(0), SearchBounds::min_layers, SearchBounds::max_layers));
  hp.units[0] = static_cast<int>(
      round_clip(genome(1), SearchBounds::min_units, SearchBounds::max_units));
  hp.units[1] = static_cast<int>(
      round_clip(genome(2), SearchBounds::min_units, SearchBounds::max_units));
  hp.learning_rate = std::pow(
      10.0, std::clamp(genome(3), SearchBounds::min_log10_lr,
                       SearchBounds::max_log10_lr));
  hp.batch_size = static_cast<int>(
      round_clip(genome(4), SearchBounds::min_batch, SearchBounds::max_batch));
  const double op = genome(5);
  hp.optimizer = op < 1.0   ? OptimizerKind::sgdm
                 : op < 2.0 ? OptimizerKind::adam
                            : OptimizerKind::rmsprop;
  return hp;
}

Eigen::VectorXd encode_hyperparams(const HyperParams& hp) {
  hp.validate();
  if (!within_search_bounds(hp)) {
    raise(ErrorCode::out_of_range_genome,
          "hyperparameters lie outside the search box");
  }
  Eigen::VectorXd genome(Genotype::dimension);
  genome(0) = static_cast<double>(hp.hidden_layers);
  genome(1) = static_cast<double>(hp.units[0]);
  genome(2) = static_cast<double>(hp.units[1]);
  genome(3) = std::log10(hp.learning_rate);
  genome(4) = static_cast<double>(hp.batch_size);
  switch (hp.optimizer) {
    case OptimizerKind::sgdm: genome(5) = 0.5; break;
    case OptimizerKind::adam: genome(5) = 1.5; break;
    case OptimizerKind::rmsprop: genome(5) = 2.5; break;
  }
  return genome;
}

bool within_search_bounds(const HyperParams& hp) {
  const bool units_ok =
      hp.units[0] >= SearchBounds::min_units &&
      hp.units[0] <= SearchBounds::max_units &&
      hp.units[1] >= SearchBounds::min_units &&
      hp.units[1] <= SearchBounds::max_units;
  return hp.hidden_layers >= SearchBounds::min_layers &&
         hp.hidden_layers <= SearchBounds::max_layers && units_ok &&
         hp.learning_rate >= std::pow(10.0, SearchBounds::min_log10_lr) &&
         hp.learning_rate <= std::pow(10.0, SearchBounds::max_log10_lr) &&
         hp.batch_size >= SearchBounds::min_batch &&
         hp.batch_size <= SearchBounds::max_batch;
}

void FitnessConfig::validate() const {
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    raise(ErrorCode::bad_params, "omega must be >= 0");
  }
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    raise(ErrorCode::bad_params, "rho must be >= 0");
  }
  if (epochs < 1) raise(ErrorCode::bad_params, "epochs must be >= 1");
  if (repetitions < 1) raise(ErrorCode::bad_params, "repetitions must be >= 1");
}

double runtime_penalty(double runtime_s, double rho) {
  return std::max(0.0, runtime_s - rho);
}

double compose_fitness(double rmse_value, double runtime_s,
                       const FitnessConfig& cfg) {
  return rmse_value + cfg.omega * runtime_penalty(runtime_s, cfg.rho);
}

namespace {

// evaluate() that tolerates degenerate predictions: MAPE and R become NaN
// instead of aborting the sweep.
EvalReport tolerant_evaluate(const Eigen::VectorXd& pred,
                             const Eigen::VectorXd& obs) {
  EvalReport report;
  report.mse = mse(as_span(pred), as_span(obs));
  report.rmse = std::sqrt(report.mse);
  report.mae = mae(as_span(pred), as_span(obs));
  report.n = static_cast<std::size_t>(pred.size());
  try {
    report.mape_pct = mape(as_span(pred), as_span(obs));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::near_zero_observation) throw;
    report.mape_pct = std::numeric_limits<double>::quiet_NaN();
  }
  try {
    report.r = pearson_r(as_span(pred), as_span(obs));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::constant_sequence) throw;
    report.r = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace

FitnessEvaluation evaluate_fitness(const HyperParams& hp,
                                   const ForecastData& data,
                                   const FitnessConfig& cfg,
                                   std::uint64_t seed, long eval_index,
                                   bool collect_test_reports) {
  cfg.validate();
  hp.validate();
  const SupervisedSet train_set = data.train.head(cfg.max_train_samples);
  const SupervisedSet val_set = data.validation.head(cfg.max_val_samples);

  FitnessEvaluation out;
  double rmse_sum = 0.0;
  double runtime_sum = 0.0;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t rep_seed =
        cfg.repetitions == 1 ? seed
                             : derive_seed(seed, "fitness-rep",
                                           static_cast<std::uint64_t>(rep));
    const auto t0 = std::chrono::steady_clock::now();
    try {
      LstmNetwork net = make_network(1, hp.units_vector(),
                                     derive_seed(rep_seed, "init"));
      TrainResult trained = train(std::move(net), train_set, val_set, hp,
                                  cfg.epochs, rep_seed);
      rmse_sum += trained.best_val_rmse;
      runtime_sum += trained.seconds;
      if (collect_test_reports) {
        const Eigen::VectorXd pred =
            predict_denormalized(trained.net, data.test);
        out.test_reports.push_back(
            tolerant_evaluate(pred, denormalized_targets(data.test)));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::non_finite_loss) throw;
      out.diverged = true;
      rmse_sum += kDivergedRmse;
      runtime_sum += std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    }
  }

  LedgerEntry& entry = out.entry;
  entry.eval_index = eval_index;
  entry.hp = hp;
  entry.rmse = rmse_sum / cfg.repetitions;
  entry.runtime_s = runtime_sum / cfg.repetitions;
  entry.penalty = runtime_penalty(entry.runtime_s, cfg.rho);
  entry.fitness = compose_fitness(entry.rmse, entry.runtime_s, cfg);
  entry.seed = seed;
  return out;
}

namespace {

// Shared ask/evaluate/tell loop; entry_fn must be safe to call from worker
// threads and fully determined by (genome, eval_index).
TuneResult tune_loop(
    const std::function<LedgerEntry(const Eigen::VectorXd&, long)>& entry_fn,
    const CmaesTuneConfig& tune_cfg) {
  if (tune_cfg.budget <= 0) {
    raise(ErrorCode::empty_budget, "evaluation budget must be >= 1");
  }
  if (tune_cfg.lambda < 4) {
    raise(ErrorCode::bad_config, "population size must be >= 4");
  }

  CmaesConfig config;
  config.dimension = Genotype::dimension;
  config.lambda = tune_cfg.lambda;
  config.initial_mean = Eigen::VectorXd::Constant(Genotype::dimension, 0.5);
  config.sigma0 = tune_cfg.sigma0;
  config.lower = Eigen::VectorXd::Zero(Genotype::dimension);
  config.upper = Eigen::VectorXd::Ones(Genotype::dimension);
  config.max_evaluations = tune_cfg.budget;
  config.seed = derive_seed(tune_cfg.seed, "cmaes");
  Cmaes es(config);

  if (tune_cfg.trace) {
    *tune_cfg.trace
        << "# generation\tevaluations\tsigma\tbest_fitness\tmedian_fitness";
    for (int i = 0; i < Genotype::dimension; ++i) {
      *tune_cfg.trace << "\tmean" << i;
    }
    *tune_cfg.trace << "\n";
  }

  TuneResult result;
  result.best_fitness = std::numeric_limits<double>::infinity();
  long done = 0;
  while (!es.should_stop() && done < tune_cfg.budget) {
    std::vector<Candidate> population = es.ask();
    const long remaining = tune_cfg.budget - done;
    const std::size_t evaluate_now = static_cast<std::size_t>(
        std::min<long>(remaining, static_cast<long>(population.size())));

    std::vector<LedgerEntry> entries(evaluate_now);
    parallel_for(evaluate_now, tune_cfg.threads, [&](std::size_t k) {
      const long index = done + static_cast<long>(k);
      entries[k] = entry_fn(Genotype::unit_to_natural(population[k].genome),
                            index);
    });
    for (std::size_t k = 0; k < evaluate_now; ++k) {
      result.ledger.push_back(entries[k]);
      population[k].fitness = entries[k].fitness;
    }
    done += static_cast<long>(evaluate_now);

    // A trailing partial generation cannot feed a distribution update.
    if (evaluate_now < population.size()) break;
    es.tell(population);

    if (tune_cfg.trace) {
      const GenerationStats stats = es.last_stats();
      *tune_cfg.trace << stats.generation << '\t' << stats.evaluations << '\t'
                      << format_double(stats.sigma) << '\t'
                      << format_double(stats.best_fitness) << '\t'
                      << format_double(stats.median_fitness);
      for (Eigen::Index i = 0; i < stats.mean.size(); ++i) {
        *tune_cfg.trace << '\t' << format_double(stats.mean(i));
      }
      *tune_cfg.trace << "\n";
    }
  }

  for (const LedgerEntry& entry : result.ledger) {
    if (entry.fitness < result.best_fitness) {
      result.best_fitness = entry.fitness;
      result.best_index = entry.eval_index;
      result.best_hp = entry.hp;
    }
  }
  return result;
}

}  // namespace

TuneResult tune_cmaes(const ForecastData& data, const FitnessConfig& cfg,
                      const CmaesTuneConfig& tune_cfg) {
  cfg.validate();
  return tune_loop(
      [&](const Eigen::VectorXd& natural, long index) {
        const HyperParams hp = decode_genome(natural);
        const std::uint64_t seed = derive_seed(tune_cfg.seed, "eval",
                                               static_cast<std::uint64_t>(index));
        return evaluate_fitness(hp, data, cfg, seed, index).entry;
      },
      tune_cfg);
}

TuneResult tune_cmaes_objective(const HyperObjective& objective,
                                const CmaesTuneConfig& tune_cfg) {
  return tune_loop(
      [&](const Eigen::VectorXd& natural, long index) {
        const HyperParams hp = decode_genome(natural);
        const double value = objective(hp);
        if (!std::isfinite(value)) {
          raise(ErrorCode::non_finite_fitness,
                "objective returned a non-finite value");
        }
        LedgerEntry entry;
        entry.eval_index = index;
        entry.hp = hp;
        entry.rmse = value;
        entry.runtime_s = 0.0;
        entry.penalty = 0.0;
        entry.fitness = value;
        entry.seed = derive_seed(tune_cfg.seed, "eval",
                                 static_cast<std::uint64_t>(index));
        return entry;
      },
      tune_cfg);
}

GridResult tune_grid(const ForecastData& data, const FitnessConfig& cfg,
                     const GridSpec& grid, std::uint64_t seed, int threads) {
  cfg.validate();
  if (grid.learning_rates.empty() || grid.batch_sizes.empty()) {
    raise(ErrorCode::empty_grid, "grid needs learning rates and batch sizes");
  }

  std::vector<HyperParams> points;
  points.reserve(grid.learning_rates.size() * grid.batch_sizes.size());
  for (const double lr : grid.learning_rates) {
    for (const int bs : grid.batch_sizes) {
      HyperParams hp = grid.base;
      hp.learning_rate = lr;
      hp.batch_size = bs;
      hp.validate();
      points.push_back(hp);
    }
  }

  GridResult out;
  out.result.best_fitness = std::numeric_limits<double>::infinity();
  std::vector<FitnessEvaluation> evals(points.size());
  parallel_for(points.size(), threads, [&](std::size_t k) {
    const std::uint64_t eval_seed =
        derive_seed(seed, "grid-eval", static_cast<std::uint64_t>(k));
    evals[k] = evaluate_fitness(points[k], data, cfg, eval_seed,
                                static_cast<long>(k), true);
  });

  for (std::size_t k = 0; k < evals.size(); ++k) {
    const FitnessEvaluation& eval = evals[k];
    out.result.ledger.push_back(eval.entry);

    SurfaceRow row;
    row.learning_rate = eval.entry.hp.learning_rate;
    row.batch_size = eval.entry.hp.batch_size;
    row.rmse = eval.entry.rmse;
    if (eval.test_reports.empty()) {
      row.mean_test_rmse = std::numeric_limits<double>::quiet_NaN();
      row.mean_test_r = std::numeric_limits<double>::quiet_NaN();
    } else {
      double rmse_sum = 0.0, r_sum = 0.0;
      for (const EvalReport& rep : eval.test_reports) {
        rmse_sum += rep.rmse;
        r_sum += rep.r;
      }
      row.mean_test_rmse = rmse_sum / static_cast<double>(eval.test_reports.size());
      row.mean_test_r = r_sum / static_cast<double>(eval.test_reports.size());
    }
    out.surface.push_back(row);

    if (eval.entry.fitness < out.result.best_fitness) {
      out.result.best_fitness = eval.entry.fitness;
      out.result.best_index = eval.entry.eval_index;
      out.result.best_hp = eval.entry.hp;
    }
  }
  return out;
}

std::vector<ArmGenerationStats> per_generation_stats(
    std::span<const LedgerEntry> ledger, int lambda) {
  if (lambda < 1) raise(ErrorCode::bad_params, "lambda must be >= 1");
  std::vector<ArmGenerationStats> rows;
  for (std::size_t start = 0; start < ledger.size();
       start += static_cast<std::size_t>(lambda)) {
    const std::size_t end =
        std::min(ledger.size(), start + static_cast<std::size_t>(lambda));
    ArmGenerationStats row;
    row.generation = static_cast<long>(start) / lambda;
    for (std::size_t i = start; i < end; ++i) {
      const LedgerEntry& e = ledger[i];
      row.mean_batch += e.hp.batch_size;
      row.mean_lr += e.hp.learning_rate;
      row.mean_units1 += e.hp.units[0];
      row.mean_runtime += e.runtime_s;
      switch (e.hp.optimizer) {
        case OptimizerKind::sgdm: ++row.n_sgdm; break;
        case OptimizerKind::adam: ++row.n_adam; break;
        case OptimizerKind::rmsprop: ++row.n_rmsprop; break;
      }
    }
    const double count = static_cast<double>(end - start);
    row.mean_batch /= count;
    row.mean_lr /= count;
    row.mean_units1 /= count;
    row.mean_runtime /= count;
    rows.push_back(row);
  }
  return rows;
}

AblationResult ablation_runtime_penalty(const ForecastData& data,
                                        const FitnessConfig& cfg,
                                        const CmaesTuneConfig& tune_cfg) {
  AblationResult result;
  result.with_penalty = tune_cmaes(data, cfg, tune_cfg);
  FitnessConfig unpenalized = cfg;
  unpenalized.omega = 0.0;
  result.without_penalty = tune_cmaes(data, unpenalized, tune_cfg);
  result.with_stats =
      per_generation_stats(result.with_penalty.ledger, tune_cfg.lambda);
  result.without_stats =
      per_generation_stats(result.without_penalty.ledger, tune_cfg.lambda);
  return result;
}

namespace {

constexpr const char* kLedgerHeader =
    "eval_index\tN_h\tN_n1\tN_n2\tL_R\tB_S\tOp\trmse\truntime_s\tpenalty\t"
    "fitness\tseed";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double_cell(const std::string& cell, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') {
    raise(ErrorCode::malformed_row, path + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

void write_ledger(const std::string& path,
                  std::span<const LedgerEntry> ledger) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write " + path);
  out << kLedgerHeader << "\n";
  for (const LedgerEntry& e : ledger) {
    out << e.eval_index << '\t' << e.hp.hidden_layers << '\t' << e.hp.units[0]
        << '\t' << e.hp.units[1] << '\t' << format_double(e.hp.learning_rate)
        << '\t' << e.hp.batch_size << '\t' << optimizer_name(e.hp.optimizer)
        << '\t' << format_double(e.rmse) << '\t' << format_double(e.runtime_s)
        << '\t' << format_double(e.penalty) << '\t' << format_double(e.fitness)
        << '\t' << e.seed << '\n';
  }
  if (!out) raise(ErrorCode::io_error, "short write to " + path);
}

std::vector<LedgerEntry> read_ledger(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::file_not_found, path);
  std::string line;
  if (!std::getline(in, line) || line != kLedgerHeader) {
    raise(ErrorCode::malformed_row, path + ": bad ledger header");
  }
  std::vector<LedgerEntry> ledger;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_tabs(line);
    if (cells.size() != 12) {
      raise(ErrorCode::malformed_row,
            path + ": expected 12 columns, got " + std::to_string(cells.size()));
    }
    LedgerEntry e;
    e.eval_index = std::stol(cells[0]);
    e.hp.hidden_layers = std::stoi(cells[1]);
    e.hp.units[0] = std::stoi(cells[2]);
    e.hp.units[1] = std::stoi(cells[3]);
    e.hp.learning_rate = parse_double_cell(cells[4], path);
    e.hp.batch_size = std::stoi(cells[5]);
    e.hp.optimizer = optimizer_from_name(cells[6]);
    e.rmse = parse_double_cell(cells[7], path);
    e.runtime_s = parse_double_cell(cells[8], path);
    e.penalty = parse_double_cell(cells[9], path);
    e.fitness = parse_double_cell(cells[10], path);
    e.seed = std::stoull(cells[11]);
    ledger.push_back(e);
  }
  return ledger;
}

void write_best_config(const std::string& path, const TuneResult& result) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write " + path);
  out << "eval_index=" << result.best_index << '\n'
      << "hidden_layers=" << result.best_hp.hidden_layers << '\n'
      << "units1=" << result.best_hp.units[0] << '\n'
      << "units2=" << result.best_hp.units[1] << '\n'
      << "learning_rate=" << format_double(result.best_hp.learning_rate) << '\n'
      << "batch_size=" << result.best_hp.batch_size << '\n'
      << "optimizer=" << optimizer_name(result.best_hp.optimizer) << '\n'
      << "fitness=" << format_double(result.best_fitness) << '\n';
  if (!out) raise(ErrorCode::io_error, "short write to " + path);
}

void write_surface(const std::string& path,
                   std::span<const SurfaceRow> surface) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write " + path);
  out << "L_R\tB_S\trmse\tmean_test_rmse\tmean_test_r\n";
  for (const SurfaceRow& row : surface) {
    out << format_double(row.learning_rate) << '\t' << row.batch_size << '\t'
        << format_double(row.rmse) << '\t'
        << format_double(row.mean_test_rmse) << '\t'
        << format_double(row.mean_test_r) << '\n';
  }
  if (!out) raise(ErrorCode::io_error, "short write to " + path);
}

void write_ablation(const std::string& path, const AblationResult& result) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write " + path);
  out << "generation\tarm\tmean_batch\tmean_lr\tmean_units1\tmean_runtime_s\t"
         "n_sgdm\tn_adam\tn_rmsprop\n";
  const auto dump = [&](const std::vector<ArmGenerationStats>& rows,
                        const char* arm) {
    for (const ArmGenerationStats& row : rows) {
      out << row.generation << '\t' << arm << '\t'
          << format_double(row.mean_batch) << '\t'
          << format_double(row.mean_lr) << '\t'
          << format_double(row.mean_units1) << '\t'
          << format_double(row.mean_runtime) << '\t' << row.n_sgdm << '\t'
          << row.n_adam << '\t' << row.n_rmsprop << '\n';
    }
  };
  dump(result.with_stats, "penalized");
  dump(result.without_stats, "unpenalized");
  if (!out) raise(ErrorCode::io_error, "short write to " + path);
}

}  // namespace windcast
