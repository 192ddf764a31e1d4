#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace windcast {

// Forecast-accuracy report for one model on one partition. Errors are in the
// units of the inputs (m/s after denormalization), MAPE in percent.
struct EvalReport {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double mape_pct = 0.0;
  double r = 0.0;
  std::size_t n = 0;
};

// Observations this close to zero make MAPE meaningless; mape() refuses them
// loudly instead of silently blowing up the average.
inline constexpr double kMapeGuard = 0.1;

double mse(std::span<const double> predictions, std::span<const double> observations);
double rmse(std::span<const double> predictions, std::span<const double> observations);
double mae(std::span<const double> predictions, std::span<const double> observations);
double mape(std::span<const double> predictions, std::span<const double> observations);
double pearson_r(std::span<const double> predictions, std::span<const double> observations);

EvalReport evaluate(std::span<const double> predictions,
                    std::span<const double> observations);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::string to_key_value(const EvalReport& report);
std::string to_json(const EvalReport& report);

// Friedman rank test. scores(i, j) is model i's score on run j; ranks are
// assigned within each run, 1 = best, ties get the average rank.
struct FriedmanResult {
  std::vector<double> mean_ranks;  // one per model
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

FriedmanResult friedman_ranks(const Eigen::MatrixXd& scores,
                              bool lower_is_better);

// Upper-tail probability of the chi-square distribution, used for the
// Friedman p-value. Thin wrapper over the regularized incomplete gamma.
double chi_square_sf(double x, int dof);

}  // namespace windcast
