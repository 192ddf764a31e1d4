#include "windcast/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "windcast/checkpoint.hpp"
#include "windcast/csv.hpp"
#include "windcast/errors.hpp"
#include "windcast/rng.hpp"
#include "windcast/train.hpp"

namespace windcast {

namespace fs = std::filesystem;

int resolve_lag(const DataConfig& data) {
  if (data.lag > 0) return data.lag;
  return data.horizon_steps == 6 ? 12 : 6;
}

void ExperimentConfig::validate() const {
  model.validate();
  fitness.validate();
  if (model_epochs < 1) raise(ErrorCode::bad_params, "epochs must be >= 1");
  if (reps < 1) raise(ErrorCode::bad_params, "reps must be >= 1");
  if (data.horizon_steps < 1) {
    raise(ErrorCode::bad_params, "horizon must be >= 1");
  }
  if (data.lag < 0) raise(ErrorCode::bad_params, "lag must be >= 0");
  if (data.block < 1) raise(ErrorCode::bad_params, "block must be >= 1");
  if (out_dir.empty()) raise(ErrorCode::bad_config, "output directory unset");
}

namespace {

double parse_double_value(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    raise(ErrorCode::bad_config, key + ": bad number '" + value + "'");
  }
  return v;
}

long parse_long_value(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    raise(ErrorCode::bad_config, key + ": bad integer '" + value + "'");
  }
  return v;
}

std::uint64_t parse_u64_value(const std::string& key,
                              const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    raise(ErrorCode::bad_config, key + ": bad integer '" + value + "'");
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::stringstream stream(value);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    out.push_back(parse_double_value(key, cell));
  }
  if (out.empty()) raise(ErrorCode::bad_config, key + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  for (const double v : parse_double_list(key, value)) {
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_value(ExperimentConfig& cfg, const std::string& dotted_key,
                        const std::string& value) {
  const std::string& k = dotted_key;
  // [data]
  if (k == "data.source") {
    if (value == "synth") cfg.data.source = DataConfig::Source::synth;
    else if (value == "csv") cfg.data.source = DataConfig::Source::csv;
    else raise(ErrorCode::bad_config, "data.source must be synth or csv");
  } else if (k == "data.csv_path") cfg.data.csv_path = value;
  else if (k == "data.csv_column") cfg.data.csv_column = value;
  else if (k == "data.lag") cfg.data.lag = static_cast<int>(parse_long_value(k, value));
  else if (k == "data.horizon_steps") cfg.data.horizon_steps = static_cast<int>(parse_long_value(k, value));
  else if (k == "data.block") cfg.data.block = static_cast<std::size_t>(parse_long_value(k, value));
  // [synth]
  else if (k == "synth.n") cfg.data.synth_n = static_cast<std::size_t>(parse_long_value(k, value));
  else if (k == "synth.step_minutes") cfg.data.step_minutes = static_cast<int>(parse_long_value(k, value));
  else if (k == "synth.shape") cfg.data.synth.weibull_shape = parse_double_value(k, value);
  else if (k == "synth.scale") cfg.data.synth.weibull_scale = parse_double_value(k, value);
  else if (k == "synth.ar") cfg.data.synth.ar_coeff = parse_double_value(k, value);
  else if (k == "synth.diurnal") cfg.data.synth.diurnal_amplitude = parse_double_value(k, value);
  else if (k == "synth.floor") cfg.data.synth.floor = parse_double_value(k, value);
  // [model]
  else if (k == "model.hidden_layers") cfg.model.hidden_layers = static_cast<int>(parse_long_value(k, value));
  else if (k == "model.units1") cfg.model.units[0] = static_cast<int>(parse_long_value(k, value));
  else if (k == "model.units2") cfg.model.units[1] = static_cast<int>(parse_long_value(k, value));
  else if (k == "model.learning_rate") cfg.model.learning_rate = parse_double_value(k, value);
  else if (k == "model.batch_size") cfg.model.batch_size = static_cast<int>(parse_long_value(k, value));
  else if (k == "model.optimizer") cfg.model.optimizer = optimizer_from_name(value);
  else if (k == "model.epochs") cfg.model_epochs = static_cast<int>(parse_long_value(k, value));
  // [tune]
  else if (k == "tune.budget") cfg.tune.budget = parse_long_value(k, value);
  else if (k == "tune.population") cfg.tune.lambda = static_cast<int>(parse_long_value(k, value));
  else if (k == "tune.sigma0") cfg.tune.sigma0 = parse_double_value(k, value);
  else if (k == "tune.omega") cfg.fitness.omega = parse_double_value(k, value);
  else if (k == "tune.rho") cfg.fitness.rho = parse_double_value(k, value);
  else if (k == "tune.epochs") cfg.fitness.epochs = static_cast<int>(parse_long_value(k, value));
  else if (k == "tune.repetitions") cfg.fitness.repetitions = static_cast<int>(parse_long_value(k, value));
  else if (k == "tune.max_train_samples") cfg.fitness.max_train_samples = static_cast<std::size_t>(parse_long_value(k, value));
  else if (k == "tune.max_val_samples") cfg.fitness.max_val_samples = static_cast<std::size_t>(parse_long_value(k, value));
  // [grid]
  else if (k == "grid.learning_rates") cfg.grid.learning_rates = parse_double_list(k, value);
  else if (k == "grid.batch_sizes") cfg.grid.batch_sizes = parse_int_list(k, value);
  // [run]
  else if (k == "run.reps") cfg.reps = static_cast<int>(parse_long_value(k, value));
  else if (k == "run.seed") cfg.seed = parse_u64_value(k, value);
  else if (k == "run.out") cfg.out_dir = value;
  else if (k == "run.threads") cfg.threads = static_cast<int>(parse_long_value(k, value));
  else raise(ErrorCode::bad_config, "unknown config key '" + k + "'");
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::file_not_found, path);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.resize(comment);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        raise(ErrorCode::bad_config,
              path + ":" + std::to_string(line_no) + ": bad section header");
      }
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      raise(ErrorCode::bad_config,
            path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (section.empty() || key.empty()) {
      raise(ErrorCode::bad_config,
            path + ":" + std::to_string(line_no) + ": key outside a section");
    }
    apply_config_value(cfg, section + "." + key, value);
  }
}

std::string dump_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[data]\n"
      << "source = "
      << (cfg.data.source == DataConfig::Source::synth ? "synth" : "csv")
      << "\n";
  if (!cfg.data.csv_path.empty()) out << "csv_path = " << cfg.data.csv_path << "\n";
  out << "csv_column = " << cfg.data.csv_column << "\n"
      << "lag = " << cfg.data.lag << "\n"
      << "horizon_steps = " << cfg.data.horizon_steps << "\n"
      << "block = " << cfg.data.block << "\n\n";
  out << "[synth]\n"
      << "n = " << cfg.data.synth_n << "\n"
      << "step_minutes = " << cfg.data.step_minutes << "\n"
      << "shape = " << format_double(cfg.data.synth.weibull_shape) << "\n"
      << "scale = " << format_double(cfg.data.synth.weibull_scale) << "\n"
      << "ar = " << format_double(cfg.data.synth.ar_coeff) << "\n"
      << "diurnal = " << format_double(cfg.data.synth.diurnal_amplitude) << "\n"
      << "floor = " << format_double(cfg.data.synth.floor) << "\n\n";
  out << "[model]\n"
      << "hidden_layers = " << cfg.model.hidden_layers << "\n"
      << "units1 = " << cfg.model.units[0] << "\n"
      << "units2 = " << cfg.model.units[1] << "\n"
      << "learning_rate = " << format_double(cfg.model.learning_rate) << "\n"
      << "batch_size = " << cfg.model.batch_size << "\n"
      << "optimizer = " << optimizer_name(cfg.model.optimizer) << "\n"
      << "epochs = " << cfg.model_epochs << "\n\n";
  out << "[tune]\n"
      << "budget = " << cfg.tune.budget << "\n"
      << "population = " << cfg.tune.lambda << "\n"
      << "sigma0 = " << format_double(cfg.tune.sigma0) << "\n"
      << "omega = " << format_double(cfg.fitness.omega) << "\n"
      << "rho = " << format_double(cfg.fitness.rho) << "\n"
      << "epochs = " << cfg.fitness.epochs << "\n"
      << "repetitions = " << cfg.fitness.repetitions << "\n"
      << "max_train_samples = " << cfg.fitness.max_train_samples << "\n"
      << "max_val_samples = " << cfg.fitness.max_val_samples << "\n\n";
  out << "[grid]\nlearning_rates = ";
  for (std::size_t i = 0; i < cfg.grid.learning_rates.size(); ++i) {
    out << (i ? "," : "") << format_double(cfg.grid.learning_rates[i]);
  }
  out << "\nbatch_sizes = ";
  for (std::size_t i = 0; i < cfg.grid.batch_sizes.size(); ++i) {
    out << (i ? "," : "") << cfg.grid.batch_sizes[i];
  }
  out << "\n\n[run]\n"
      << "reps = " << cfg.reps << "\n"
      << "seed = " << cfg.seed << "\n"
      << "out = " << cfg.out_dir << "\n"
      << "threads = " << cfg.threads << "\n";
  return out.str();
}

TimeSeries build_series(const ExperimentConfig& cfg) {
  if (cfg.data.source == DataConfig::Source::csv) {
    if (cfg.data.csv_path.empty()) {
      raise(ErrorCode::bad_config, "data.csv_path unset with data.source = csv");
    }
    return load_csv(cfg.data.csv_path, cfg.data.csv_column);
  }
  return synth_wind(cfg.data.synth_n, cfg.data.step_minutes,
                    derive_seed(cfg.seed, "synth"), cfg.data.synth);
}

ForecastData build_data(const ExperimentConfig& cfg) {
  const TimeSeries series = build_series(cfg);
  return assemble_dataset(series, resolve_lag(cfg.data),
                          cfg.data.horizon_steps, cfg.data.fractions,
                          cfg.data.block, derive_seed(cfg.seed, "split"));
}

namespace {

void ensure_out_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    raise(ErrorCode::io_error,
          "cannot create " + cfg.out_dir + ": " + ec.message());
  }
  std::ofstream out(fs::path(cfg.out_dir) / "config_used.txt");
  out << dump_config(cfg);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void write_report_files(const ExperimentConfig& cfg, const std::string& stem,
                        const EvalReport& report) {
  std::ofstream kv(out_path(cfg, stem + ".kv"));
  if (!kv) raise(ErrorCode::io_error, "cannot write " + stem + ".kv");
  kv << to_key_value(report);
  std::ofstream js(out_path(cfg, stem + ".json"));
  if (!js) raise(ErrorCode::io_error, "cannot write " + stem + ".json");
  js << to_json(report);
}

}  // namespace

ReportAggregates aggregate_reports(std::span<const EvalReport> reports) {
  if (reports.empty()) raise(ErrorCode::empty_input, "no reports to aggregate");
  const double n = static_cast<double>(reports.size());
  ReportAggregates agg;
  agg.min = agg.max = reports[0];
  for (const EvalReport& r : reports) {
    agg.mean.mse += r.mse;
    agg.mean.rmse += r.rmse;
    agg.mean.mae += r.mae;
    agg.mean.mape_pct += r.mape_pct;
    agg.mean.r += r.r;
    agg.min.mse = std::min(agg.min.mse, r.mse);
    agg.min.rmse = std::min(agg.min.rmse, r.rmse);
    agg.min.mae = std::min(agg.min.mae, r.mae);
    agg.min.mape_pct = std::min(agg.min.mape_pct, r.mape_pct);
    agg.min.r = std::min(agg.min.r, r.r);
    agg.max.mse = std::max(agg.max.mse, r.mse);
    agg.max.rmse = std::max(agg.max.rmse, r.rmse);
    agg.max.mae = std::max(agg.max.mae, r.mae);
    agg.max.mape_pct = std::max(agg.max.mape_pct, r.mape_pct);
    agg.max.r = std::max(agg.max.r, r.r);
  }
  agg.mean.mse /= n;
  agg.mean.rmse /= n;
  agg.mean.mae /= n;
  agg.mean.mape_pct /= n;
  agg.mean.r /= n;
  agg.mean.n = reports[0].n;
  agg.min.n = agg.max.n = agg.std_dev.n = reports[0].n;
  if (reports.size() > 1) {
    for (const EvalReport& r : reports) {
      agg.std_dev.mse += (r.mse - agg.mean.mse) * (r.mse - agg.mean.mse);
      agg.std_dev.rmse += (r.rmse - agg.mean.rmse) * (r.rmse - agg.mean.rmse);
      agg.std_dev.mae += (r.mae - agg.mean.mae) * (r.mae - agg.mean.mae);
      agg.std_dev.mape_pct +=
          (r.mape_pct - agg.mean.mape_pct) * (r.mape_pct - agg.mean.mape_pct);
      agg.std_dev.r += (r.r - agg.mean.r) * (r.r - agg.mean.r);
    }
    agg.std_dev.mse = std::sqrt(agg.std_dev.mse / (n - 1.0));
    agg.std_dev.rmse = std::sqrt(agg.std_dev.rmse / (n - 1.0));
    agg.std_dev.mae = std::sqrt(agg.std_dev.mae / (n - 1.0));
    agg.std_dev.mape_pct = std::sqrt(agg.std_dev.mape_pct / (n - 1.0));
    agg.std_dev.r = std::sqrt(agg.std_dev.r / (n - 1.0));
  }
  return agg;
}

namespace {

void write_summary_row(std::ostream& out, const std::string& rep,
                       const std::string& partition, const EvalReport& r,
                       double seconds) {
  out << rep << '\t' << partition << '\t' << format_double(r.mse) << '\t'
      << format_double(r.rmse) << '\t' << format_double(r.mae) << '\t'
      << format_double(r.mape_pct) << '\t' << format_double(r.r) << '\t'
      << r.n << '\t' << format_double(seconds) << '\n';
}

}  // namespace

void write_summary(const std::string& path, const RunSummary& summary) {
  if (summary.test_reports.size() != summary.train_reports.size() ||
      summary.seconds.size() != summary.train_reports.size()) {
    raise(ErrorCode::length_mismatch, "summary sections differ in length");
  }
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write " + path);
  out << "model\t" << summary.model << '\n'
      << "hidden_layers\t" << summary.hp.hidden_layers << '\n'
      << "units1\t" << summary.hp.units[0] << '\n'
      << "units2\t" << summary.hp.units[1] << '\n'
      << "learning_rate\t" << format_double(summary.hp.learning_rate) << '\n'
      << "batch_size\t" << summary.hp.batch_size << '\n'
      << "optimizer\t" << optimizer_name(summary.hp.optimizer) << '\n'
      << "epochs\t" << summary.epochs << '\n'
      << '\n'
      << "rep\tpartition\tmse\trmse\tmae\tmape_pct\tr\tn\tseconds\n";
  for (std::size_t i = 0; i < summary.train_reports.size(); ++i) {
    write_summary_row(out, std::to_string(i), "train",
                      summary.train_reports[i], summary.seconds[i]);
    write_summary_row(out, std::to_string(i), "test", summary.test_reports[i],
                      summary.seconds[i]);
  }
  for (const auto& [label, partition_reports] :
       {std::pair<const char*, const std::vector<EvalReport>*>{
            "train", &summary.train_reports},
        {"test", &summary.test_reports}}) {
    const ReportAggregates agg = aggregate_reports(*partition_reports);
    write_summary_row(out, "mean", label, agg.mean, 0.0);
    write_summary_row(out, "min", label, agg.min, 0.0);
    write_summary_row(out, "max", label, agg.max, 0.0);
    write_summary_row(out, "std", label, agg.std_dev, 0.0);
  }
  if (!out) raise(ErrorCode::io_error, "short write to " + path);
}

RunSummary read_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::file_not_found, path);
  RunSummary summary;
  std::string line;
  // header block: key<TAB>value until the blank separator
  while (std::getline(in, line) && !line.empty()) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      raise(ErrorCode::malformed_row, path + ": bad summary header line");
    }
    const std::string key = line.substr(0, tab);
    const std::string value = line.substr(tab + 1);
    if (key == "model") summary.model = value;
    else if (key == "hidden_layers") summary.hp.hidden_layers = std::stoi(value);
    else if (key == "units1") summary.hp.units[0] = std::stoi(value);
    else if (key == "units2") summary.hp.units[1] = std::stoi(value);
    else if (key == "learning_rate") summary.hp.learning_rate = std::stod(value);
    else if (key == "batch_size") summary.hp.batch_size = std::stoi(value);
    else if (key == "optimizer") summary.hp.optimizer = optimizer_from_name(value);
    else if (key == "epochs") summary.epochs = std::stoi(value);
    else raise(ErrorCode::malformed_row, path + ": unknown header '" + key + "'");
  }
  if (!std::getline(in, line) ||
      line != "rep\tpartition\tmse\trmse\tmae\tmape_pct\tr\tn\tseconds") {
    raise(ErrorCode::malformed_row, path + ": bad summary table header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = line.find('\t', start);
      if (pos == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (cells.size() != 9) {
      raise(ErrorCode::malformed_row, path + ": bad summary row");
    }
    if (cells[0] == "mean" || cells[0] == "min" || cells[0] == "max" ||
        cells[0] == "std") {
      continue;  // aggregates are recomputed on demand
    }
    EvalReport report;
    report.mse = std::stod(cells[2]);
    report.rmse = std::stod(cells[3]);
    report.mae = std::stod(cells[4]);
    report.mape_pct = std::stod(cells[5]);
    report.r = std::stod(cells[6]);
    report.n = static_cast<std::size_t>(std::stoul(cells[7]));
    if (cells[1] == "train") {
      summary.train_reports.push_back(report);
      summary.seconds.push_back(std::stod(cells[8]));
    } else if (cells[1] == "test") {
      summary.test_reports.push_back(report);
    } else {
      raise(ErrorCode::malformed_row, path + ": bad partition " + cells[1]);
    }
  }
  if (summary.train_reports.size() != summary.test_reports.size()) {
    raise(ErrorCode::malformed_row, path + ": unpaired partition rows");
  }
  return summary;
}

std::string cmd_synth(const ExperimentConfig& cfg,
                      const std::string& csv_path_override) {
  cfg.validate();
  ensure_out_dir(cfg);
  const TimeSeries series =
      synth_wind(cfg.data.synth_n, cfg.data.step_minutes,
                 derive_seed(cfg.seed, "synth"), cfg.data.synth);
  const std::string path = csv_path_override.empty()
                               ? out_path(cfg, "synth.csv")
                               : csv_path_override;
  write_csv(path, series, cfg.data.csv_column);
  return path;
}

namespace {

// Trains cfg.model for cfg.reps repetitions on the standard protocol and
// writes summary plus per-repetition checkpoints. `label` names the model in
// the summary; checkpoint files are <label>_rep<k>.ckpt.
RunSummary run_repetitions(const ExperimentConfig& cfg, const HyperParams& hp,
                           const std::string& label) {
  const ForecastData data = build_data(cfg);

  RunSummary summary;
  summary.model = label;
  summary.hp = hp;
  summary.epochs = cfg.model_epochs;

  for (int rep = 0; rep < cfg.reps; ++rep) {
    const std::uint64_t rep_seed =
        derive_seed(cfg.seed, "rep", static_cast<std::uint64_t>(rep));
    LstmNetwork net =
        make_network(1, hp.units_vector(), derive_seed(rep_seed, "init"));
    const TrainResult trained =
        train(std::move(net), data.train, data.validation, hp,
              cfg.model_epochs, rep_seed);

    const Eigen::VectorXd train_pred =
        predict_denormalized(trained.net, data.train);
    const Eigen::VectorXd test_pred =
        predict_denormalized(trained.net, data.test);
    const EvalReport train_report =
        evaluate(as_span(train_pred), as_span(denormalized_targets(data.train)));
    const EvalReport test_report =
        evaluate(as_span(test_pred), as_span(denormalized_targets(data.test)));
    summary.train_reports.push_back(train_report);
    summary.test_reports.push_back(test_report);
    summary.seconds.push_back(trained.seconds);

    Checkpoint checkpoint;
    checkpoint.net = trained.net;
    checkpoint.norm = data.train.norm;
    checkpoint.hp = hp;
    checkpoint.lag = resolve_lag(cfg.data);
    checkpoint.horizon = cfg.data.horizon_steps;
    checkpoint.seed = rep_seed;
    checkpoint.train_rmse = train_report.rmse;
    checkpoint.test_rmse = test_report.rmse;
    save_checkpoint(
        out_path(cfg, label + "_rep" + std::to_string(rep) + ".ckpt"),
        checkpoint);
  }
  return summary;
}

RunSummary persistence_summary(const ExperimentConfig& cfg, int reps) {
  const ForecastData data = build_data(cfg);
  const Eigen::VectorXd raw = persistence_forecast(data.test);
  const Eigen::VectorXd pred =
      (raw.array() * data.test.norm.scale + data.test.norm.shift).matrix();
  const EvalReport test_report =
      evaluate(as_span(pred), as_span(denormalized_targets(data.test)));

  const Eigen::VectorXd train_raw = persistence_forecast(data.train);
  const Eigen::VectorXd train_pred =
      (train_raw.array() * data.train.norm.scale + data.train.norm.shift)
          .matrix();
  const EvalReport train_report =
      evaluate(as_span(train_pred), as_span(denormalized_targets(data.train)));

  RunSummary summary;
  summary.model = "persistence";
  summary.hp = cfg.model;
  summary.epochs = 0;
  // The baseline is deterministic; repetition rows are identical and exist
  // so comparisons see equally many runs per model.
  for (int rep = 0; rep < reps; ++rep) {
    summary.train_reports.push_back(train_report);
    summary.test_reports.push_back(test_report);
    summary.seconds.push_back(0.0);
  }
  return summary;
}

}  // namespace

RunSummary cmd_train(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_out_dir(cfg);
  const RunSummary summary = run_repetitions(cfg, cfg.model, "lstm");
  write_summary(out_path(cfg, "summary.tsv"), summary);
  write_summary(out_path(cfg, "persistence_summary.tsv"),
                persistence_summary(cfg, cfg.reps));
  return summary;
}

TuneResult cmd_tune(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_out_dir(cfg);
  const ForecastData data = build_data(cfg);

  CmaesTuneConfig tune_cfg = cfg.tune;
  tune_cfg.seed = derive_seed(cfg.seed, "tune");
  tune_cfg.threads = cfg.threads;

  if (cfg.tune_ablation) {
    const AblationResult ablation =
        ablation_runtime_penalty(data, cfg.fitness, tune_cfg);
    write_ablation(out_path(cfg, "ablation.tsv"), ablation);
    write_ledger(out_path(cfg, "ledger_penalized.tsv"),
                 ablation.with_penalty.ledger);
    write_ledger(out_path(cfg, "ledger_unpenalized.tsv"),
                 ablation.without_penalty.ledger);
    write_best_config(out_path(cfg, "best_penalized.kv"),
                      ablation.with_penalty);
    write_best_config(out_path(cfg, "best_unpenalized.kv"),
                      ablation.without_penalty);
    return ablation.with_penalty;
  }

  std::ofstream trace(out_path(cfg, "trace.tsv"));
  if (!trace) raise(ErrorCode::io_error, "cannot write trace.tsv");
  tune_cfg.trace = &trace;

  const TuneResult result = tune_cmaes(data, cfg.fitness, tune_cfg);
  write_ledger(out_path(cfg, "ledger.tsv"), result.ledger);
  write_best_config(out_path(cfg, "best.kv"), result);

  const RunSummary summary = run_repetitions(cfg, result.best_hp, "cmaes-lstm");
  write_summary(out_path(cfg, "summary.tsv"), summary);
  write_summary(out_path(cfg, "persistence_summary.tsv"),
                persistence_summary(cfg, cfg.reps));
  return result;
}

GridResult cmd_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_out_dir(cfg);
  const ForecastData data = build_data(cfg);

  GridSpec grid = cfg.grid;
  grid.base = cfg.model;
  const GridResult result = tune_grid(data, cfg.fitness, grid,
                                      derive_seed(cfg.seed, "grid"),
                                      cfg.threads);
  write_ledger(out_path(cfg, "ledger.tsv"), result.result.ledger);
  write_surface(out_path(cfg, "surface.tsv"), result.surface);
  write_best_config(out_path(cfg, "best.kv"), result.result);

  const RunSummary summary =
      run_repetitions(cfg, result.result.best_hp, "grid-lstm");
  write_summary(out_path(cfg, "summary.tsv"), summary);
  return result;
}

void cmd_evaluate(const ExperimentConfig& cfg,
                  const std::string& checkpoint_path) {
  cfg.validate();
  ensure_out_dir(cfg);
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);

  const TimeSeries series = build_series(cfg);
  const SupervisedSet all =
      make_windows(series, checkpoint.lag, checkpoint.horizon);
  const SplitIndices idx = block_split(all.size(), cfg.data.fractions,
                                       cfg.data.block,
                                       derive_seed(cfg.seed, "split"));

  // The checkpoint's scaler is authoritative; refitting would shift every
  // prediction.
  auto prepare = [&](const std::vector<std::size_t>& indices) {
    SupervisedSet set = all.subset(indices);
    set.inputs.array() -= checkpoint.norm.shift;
    set.inputs.array() /= checkpoint.norm.scale;
    set.targets.array() -= checkpoint.norm.shift;
    set.targets.array() /= checkpoint.norm.scale;
    set.norm = checkpoint.norm;
    return set;
  };
  const SupervisedSet train_set = prepare(idx.train);
  const SupervisedSet test_set = prepare(idx.test);

  const Eigen::VectorXd train_pred =
      predict_denormalized(checkpoint.net, train_set);
  const Eigen::VectorXd test_pred =
      predict_denormalized(checkpoint.net, test_set);
  const EvalReport train_report = evaluate(
      as_span(train_pred), as_span(denormalized_targets(train_set)));
  const EvalReport test_report =
      evaluate(as_span(test_pred), as_span(denormalized_targets(test_set)));

  write_report_files(cfg, "report_train", train_report);
  write_report_files(cfg, "report_test", test_report);

  const Eigen::VectorXd observed = denormalized_targets(test_set);
  std::ofstream pred_out(out_path(cfg, "predictions.csv"));
  if (!pred_out) raise(ErrorCode::io_error, "cannot write predictions.csv");
  pred_out << "timestamp,observed_ms,predicted_ms\n";
  for (Eigen::Index i = 0; i < test_pred.size(); ++i) {
    pred_out << format_iso8601(
                    test_set.target_timestamps[static_cast<std::size_t>(i)])
             << ',' << format_double(observed(i)) << ','
             << format_double(test_pred(i)) << '\n';
  }
  if (!pred_out) raise(ErrorCode::io_error, "short write to predictions.csv");
}

std::vector<std::pair<std::string, FriedmanResult>> cmd_compare(
    const std::vector<std::string>& summary_paths, const std::string& out_dir) {
  if (summary_paths.size() < 2) {
    raise(ErrorCode::bad_params, "compare needs at least two summaries");
  }
  std::vector<RunSummary> summaries;
  for (const std::string& path : summary_paths) {
    summaries.push_back(read_summary(path));
  }
  const std::size_t reps = summaries[0].test_reports.size();
  for (const RunSummary& s : summaries) {
    if (s.test_reports.size() != reps) {
      raise(ErrorCode::mismatched_repetitions,
            s.model + " has " + std::to_string(s.test_reports.size()) +
                " runs, expected " + std::to_string(reps));
    }
  }
  if (reps == 0) raise(ErrorCode::empty_input, "summaries carry no runs");

  const std::size_t k = summaries.size();
  const auto fill = [&](auto getter) {
    Eigen::MatrixXd scores(k, reps);
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t run = 0; run < reps; ++run) {
        scores(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(run)) =
            getter(summaries[m].test_reports[run]);
      }
    }
    return scores;
  };

  std::vector<std::pair<std::string, FriedmanResult>> results;
  results.emplace_back("mse", friedman_ranks(fill([](const EvalReport& r) {
                         return r.mse;
                       }), true));
  results.emplace_back("rmse", friedman_ranks(fill([](const EvalReport& r) {
                         return r.rmse;
                       }), true));
  results.emplace_back("mae", friedman_ranks(fill([](const EvalReport& r) {
                         return r.mae;
                       }), true));
  results.emplace_back("mape_pct", friedman_ranks(fill([](const EvalReport& r) {
                         return r.mape_pct;
                       }), true));
  results.emplace_back("r", friedman_ranks(fill([](const EvalReport& r) {
                         return r.r;
                       }), false));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) raise(ErrorCode::io_error, "cannot create " + out_dir);
  std::ofstream out(fs::path(out_dir) / "friedman.tsv");
  if (!out) raise(ErrorCode::io_error, "cannot write friedman.tsv");
  out << "metric\tmodel\tmean_rank\tchi_square\tdof\tp_value\n";
  for (const auto& [metric, fr] : results) {
    for (std::size_t m = 0; m < k; ++m) {
      out << metric << '\t' << summaries[m].model << '\t'
          << format_double(fr.mean_ranks[m]) << '\t'
          << format_double(fr.chi_square) << '\t' << fr.dof << '\t'
          << format_double(fr.p_value) << '\n';
    }
  }
  if (!out) raise(ErrorCode::io_error, "short write to friedman.tsv");
  return results;
}

}  // namespace windcast
