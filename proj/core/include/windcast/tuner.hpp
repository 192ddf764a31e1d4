#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "windcast/dataset.hpp"
#include "windcast/hyperparams.hpp"
#include "windcast/metrics.hpp"

namespace windcast {

// Search box for hyperparameter tuning. Networks outside this box are still
// trainable; the box only constrains what the tuner explores.
struct SearchBounds {
  static constexpr int min_layers = 1, max_layers = 2;
  static constexpr int min_units = 30, max_units = 230;
  static constexpr double min_log10_lr = -5.0, max_log10_lr = -1.0;
  static constexpr int min_batch = 8, max_batch = 1024;
};

// Genotype coordinates, natural units:
//   [layers, units1, units2, log10(lr), batch, optimizer-bin]
// The optimizer coordinate covers [0, 3): [0,1) sgdm, [1,2) adam,
// [2,3] rmsprop. CMA-ES itself runs on the unit cube (see tune_cmaes);
// sigma0 = 0.25 would be meaningless across coordinates whose spans differ
// by two orders of magnitude.
struct Genotype {
  static constexpr int dimension = 6;
  static Eigen::VectorXd lower();
  static Eigen::VectorXd upper();
  static Eigen::VectorXd unit_to_natural(const Eigen::VectorXd& unit);
};

// Round-and-clip decode. Genomes outside the natural box by more than a
// small tolerance raise OutOfRangeGenome (repaired genomes always decode).
HyperParams decode_genome(const Eigen::VectorXd& genome);
Eigen::VectorXd encode_hyperparams(const HyperParams& hp);
bool within_search_bounds(const HyperParams& hp);

struct FitnessConfig {
  double omega = 1e-3;  // runtime-penalty weight
  double rho = 600.0;   // free-runtime threshold, seconds
  int epochs = 100;
  int repetitions = 1;  // training repetitions averaged per candidate
  // Candidate training can be capped to the first k samples of the (already
  // block-shuffled) partitions; 0 means use everything.
  std::size_t max_train_samples = 0;
  std::size_t max_val_samples = 0;

  void validate() const;
};

double runtime_penalty(double runtime_s, double rho);
// fitness = rmse + omega * max(0, runtime - rho)
double compose_fitness(double rmse_value, double runtime_s,
                       const FitnessConfig& cfg);

// Diverged trainings score this RMSE sentinel so the optimizer routes away
// while the fitness decomposition still holds exactly.
inline constexpr double kDivergedRmse = 1e9;

struct LedgerEntry {
  long eval_index = 0;
  HyperParams hp;
  double rmse = 0.0;       // validation partition, m/s
  double runtime_s = 0.0;  // training wall clock
  double penalty = 0.0;
  double fitness = 0.0;
  std::uint64_t seed = 0;
};

struct FitnessEvaluation {
  LedgerEntry entry;
  bool diverged = false;
  std::vector<EvalReport> test_reports;  // one per repetition, when collected
};

// Trains hp on the (possibly capped) train partition, scores RMSE on the
// (possibly capped) validation partition, and composes the penalized
// fitness. Repetitions are averaged.
FitnessEvaluation evaluate_fitness(const HyperParams& hp,
                                   const ForecastData& data,
                                   const FitnessConfig& cfg,
                                   std::uint64_t seed, long eval_index,
                                   bool collect_test_reports = false);

struct TuneResult {
  HyperParams best_hp;
  double best_fitness = 0.0;
  long best_index = -1;
  std::vector<LedgerEntry> ledger;
};

struct CmaesTuneConfig {
  int lambda = 12;
  double sigma0 = 0.25;   // on the unit cube
  long budget = 1000;     // total evaluations
  std::uint64_t seed = 0;
  int threads = 0;        // 0 = WINDCAST_THREADS / hardware
  std::ostream* trace = nullptr;  // per-generation TSV
};

// CMA-ES over the genotype box. Candidate evaluations within a generation
// may run in parallel; seeds derive from the evaluation index, so the ledger
// does not depend on scheduling. A trailing partial generation is evaluated
// but not used for a distribution update.
TuneResult tune_cmaes(const ForecastData& data, const FitnessConfig& cfg,
                      const CmaesTuneConfig& tune_cfg);

// Same search loop over an arbitrary objective; runtime and penalty are
// recorded as zero. Used to exercise the tuner without training networks.
using HyperObjective = std::function<double(const HyperParams&)>;
TuneResult tune_cmaes_objective(const HyperObjective& objective,
                                const CmaesTuneConfig& tune_cfg);

struct GridSpec {
  std::vector<double> learning_rates;
  std::vector<int> batch_sizes;
  HyperParams base;  // fixed structure fields (layers, units, optimizer)
};

struct SurfaceRow {
  double learning_rate = 0.0;
  int batch_size = 0;
  double rmse = 0.0;  // validation RMSE, identical to the ledger entry
  double mean_test_rmse = 0.0;
  double mean_test_r = 0.0;
};

struct GridResult {
  TuneResult result;
  std::vector<SurfaceRow> surface;
};

// Exhaustive sweep over learning_rates x batch_sizes (row-major order:
// learning rate outer, batch size inner).
GridResult tune_grid(const ForecastData& data, const FitnessConfig& cfg,
                     const GridSpec& grid, std::uint64_t seed,
                     int threads = 0);

struct ArmGenerationStats {
  long generation = 0;
  double mean_batch = 0.0;
  double mean_lr = 0.0;
  double mean_units1 = 0.0;
  double mean_runtime = 0.0;
  int n_sgdm = 0, n_adam = 0, n_rmsprop = 0;
};

struct AblationResult {
  TuneResult with_penalty;     // cfg.omega as given
  TuneResult without_penalty;  // omega = 0, same seeds
  std::vector<ArmGenerationStats> with_stats, without_stats;
};

// Runs the tuner twice with identical seeds and budget, once with the
// runtime penalty and once with omega = 0.
AblationResult ablation_runtime_penalty(const ForecastData& data,
                                        const FitnessConfig& cfg,
                                        const CmaesTuneConfig& tune_cfg);

std::vector<ArmGenerationStats> per_generation_stats(
    std::span<const LedgerEntry> ledger, int lambda);

// Ledger file: header row plus one tab-separated line per evaluation with
// columns eval_index, N_h, N_n1, N_n2, L_R, B_S, Op, rmse, runtime_s,
// penalty, fitness, seed. Doubles round-trip exactly.
void write_ledger(const std::string& path, std::span<const LedgerEntry> ledger);
std::vector<LedgerEntry> read_ledger(const std::string& path);

void write_best_config(const std::string& path, const TuneResult& result);
void write_surface(const std::string& path, std::span<const SurfaceRow> surface);
void write_ablation(const std::string& path, const AblationResult& result);

}  // namespace windcast
