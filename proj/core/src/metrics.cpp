#include "windcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "windcast/csv.hpp"
#include "windcast/errors.hpp"

namespace windcast {

namespace {

void check_pair(std::span<const double> predictions,
                std::span<const double> observations) {
  if (predictions.size() != observations.size()) {
    raise(ErrorCode::length_mismatch,
          std::to_string(predictions.size()) + " predictions vs " +
              std::to_string(observations.size()) + " observations");
  }
  if (predictions.empty()) raise(ErrorCode::empty_input, "no samples");
}

}  // namespace

double mse(std::span<const double> predictions,
           std::span<const double> observations) {
  check_pair(predictions, observations);
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - observations[i];
    sum += e * e;
  }
  return sum / static_cast<double>(predictions.size());
}

double rmse(std::span<const double> predictions,
            std::span<const double> observations) {
  return std::sqrt(mse(predictions, observations));
}

double mae(std::span<const double> predictions,
           std::span<const double> observations) {
  check_pair(predictions, observations);
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    sum += std::abs(predictions[i] - observations[i]);
  }
  return sum / static_cast<double>(predictions.size());
}

double mape(std::span<const double> predictions,
            std::span<const double> observations) {
  check_pair(predictions, observations);
  std::string offenders;
  int offender_count = 0;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (std::abs(observations[i]) <= kMapeGuard) {
      if (offender_count < 5) {
        offenders += (offender_count ? ", " : "") + std::to_string(i);
      }
      ++offender_count;
    }
  }
  if (offender_count > 0) {
    raise(ErrorCode::near_zero_observation,
          std::to_string(offender_count) + " observation(s) within " +
              format_double(kMapeGuard) + " of zero (indices " + offenders +
              (offender_count > 5 ? ", ..." : "") + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    sum += std::abs(predictions[i] - observations[i]) /
           std::abs(observations[i]);
  }
  return 100.0 * sum / static_cast<double>(predictions.size());
}

double pearson_r(std::span<const double> predictions,
                 std::span<const double> observations) {
  check_pair(predictions, observations);
  const double n = static_cast<double>(predictions.size());
  const double mp =
      std::accumulate(predictions.begin(), predictions.end(), 0.0) / n;
  const double mo =
      std::accumulate(observations.begin(), observations.end(), 0.0) / n;
  double spo = 0.0, spp = 0.0, soo = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double dp = predictions[i] - mp;
    const double dob = observations[i] - mo;
    spo += dp * dob;
    spp += dp * dp;
    soo += dob * dob;
  }
  if (spp == 0.0 || soo == 0.0) {
    raise(ErrorCode::constant_sequence,
          "correlation undefined for a constant sequence");
  }
  const double r = spo / std::sqrt(spp * soo);
  return std::clamp(r, -1.0, 1.0);
}

EvalReport evaluate(std::span<const double> predictions,
                    std::span<const double> observations) {
  EvalReport report;
  report.mse = mse(predictions, observations);
  report.rmse = std::sqrt(report.mse);
  report.mae = mae(predictions, observations);
  report.mape_pct = mape(predictions, observations);
  report.r = pearson_r(predictions, observations);
  report.n = predictions.size();
  return report;
}

std::string to_key_value(const EvalReport& report) {
  std::ostringstream out;
  out << "mse=" << format_double(report.mse) << '\n'
      << "rmse=" << format_double(report.rmse) << '\n'
      << "mae=" << format_double(report.mae) << '\n'
      << "mape_pct=" << format_double(report.mape_pct) << '\n'
      << "r=" << format_double(report.r) << '\n'
      << "n=" << report.n << '\n';
  return out.str();
}

std::string to_json(const EvalReport& report) {
  nlohmann::json j{{"mse", report.mse},           {"rmse", report.rmse},
                   {"mae", report.mae},           {"mape_pct", report.mape_pct},
                   {"r", report.r},               {"n", report.n}};
  return j.dump(2) + "\n";
}

namespace {

// Regularized incomplete gamma, series form (converges fast for x < a + 1).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued-fraction form of the upper tail (modified Lentz), good for
// x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_sf(double x, int dof) {
  if (dof < 1) raise(ErrorCode::bad_params, "chi-square dof must be >= 1");
  if (!(x > 0.0)) return 1.0;
  const double a = 0.5 * static_cast<double>(dof);
  const double half = 0.5 * x;
  if (half < a + 1.0) return 1.0 - gamma_p_series(a, half);
  return gamma_q_cf(a, half);
}

FriedmanResult friedman_ranks(const Eigen::MatrixXd& scores,
                              bool lower_is_better) {
  const Eigen::Index k = scores.rows();
  const Eigen::Index n = scores.cols();
  if (k < 2 || n < 2) {
    raise(ErrorCode::degenerate_table,
          "need at least 2 models and 2 runs, got " + std::to_string(k) + "x" +
              std::to_string(n));
  }
  if (!scores.allFinite()) {
    raise(ErrorCode::degenerate_table, "scores contain non-finite values");
  }

  FriedmanResult result;
  result.mean_ranks.assign(static_cast<std::size_t>(k), 0.0);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < n; ++j) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return lower_is_better ? scores(a, j) < scores(b, j)
                                              : scores(a, j) > scores(b, j);
                     });
    // Tied scores share the average of the ranks they span.
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j2 = i + 1;
      while (j2 < order.size() &&
             scores(order[j2], j) == scores(order[i], j)) {
        ++j2;
      }
      const double avg_rank = 0.5 * static_cast<double>(i + 1 + j2);
      for (std::size_t t = i; t < j2; ++t) {
        result.mean_ranks[static_cast<std::size_t>(order[t])] += avg_rank;
      }
      i = j2;
    }
  }
  for (double& r : result.mean_ranks) r /= static_cast<double>(n);

  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  double dev = 0.0;
  for (const double r : result.mean_ranks) {
    const double d = r - 0.5 * (kd + 1.0);
    dev += d * d;
  }
  result.chi_square = 12.0 * nd / (kd * (kd + 1.0)) * dev;
  result.dof = static_cast<int>(k) - 1;
  result.p_value = chi_square_sf(result.chi_square, result.dof);
  return result;
}

}  // namespace windcast
