#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "windcast/dataset.hpp"
#include "windcast/hyperparams.hpp"
#include "windcast/metrics.hpp"
#include "windcast/synth.hpp"
#include "windcast/tuner.hpp"

namespace windcast {

struct DataConfig {
  enum class Source { synth, csv };
  Source source = Source::synth;
  std::string csv_path;
  std::string csv_column = "speed_ms";
  std::size_t synth_n = 20000;
  int step_minutes = 10;
  SynthParams synth;
  int lag = 0;          // 0 = auto: 6, or 12 when horizon_steps == 6
  int horizon_steps = 1;
  std::size_t block = 144;
  SplitFractions fractions;
};

int resolve_lag(const DataConfig& data);

struct ExperimentConfig {
  DataConfig data;
  HyperParams model;
  int model_epochs = 100;
  FitnessConfig fitness;      // tuning-time fitness settings
  CmaesTuneConfig tune;       // lambda / sigma0 / budget / threads
  GridSpec grid{{1e-4, 1e-3, 1e-2}, {128, 512, 1024}, {}};
  bool tune_ablation = false;
  int reps = 10;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 0;

  void validate() const;
};

// key = value files with [section] headers; '#' and ';' start comments.
// Unknown keys are rejected.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);
// Single "section.key" override, used for command-line flags.
void apply_config_value(ExperimentConfig& cfg, const std::string& dotted_key,
                        const std::string& value);
std::string dump_config(const ExperimentConfig& cfg);

TimeSeries build_series(const ExperimentConfig& cfg);
ForecastData build_data(const ExperimentConfig& cfg);

// Per-repetition reports of one model plus the provenance needed to rebuild
// or compare it.
struct RunSummary {
  std::string model;
  HyperParams hp;
  int epochs = 0;
  std::vector<EvalReport> train_reports;
  std::vector<EvalReport> test_reports;
  std::vector<double> seconds;
};

struct ReportAggregates {
  EvalReport mean, min, max, std_dev;
};
ReportAggregates aggregate_reports(std::span<const EvalReport> reports);

void write_summary(const std::string& path, const RunSummary& summary);
RunSummary read_summary(const std::string& path);

// Command cores. The CLI binary parses flags, builds the config, and calls
// these; every artifact lands under cfg.out_dir.
std::string cmd_synth(const ExperimentConfig& cfg,
                      const std::string& csv_path_override = "");
RunSummary cmd_train(const ExperimentConfig& cfg);
TuneResult cmd_tune(const ExperimentConfig& cfg);
GridResult cmd_grid(const ExperimentConfig& cfg);
void cmd_evaluate(const ExperimentConfig& cfg,
                  const std::string& checkpoint_path);
std::vector<std::pair<std::string, FriedmanResult>> cmd_compare(
    const std::vector<std::string>& summary_paths, const std::string& out_dir);

}  // namespace windcast
