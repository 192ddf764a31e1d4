#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "windcast/rng.hpp"

namespace windcast {

struct CmaesConfig {
  int dimension = 0;
  int lambda = 0;  // population size; 0 = 4 + floor(3 ln n)
  int mu = 0;      // parents; 0 = lambda / 2
  Eigen::VectorXd initial_mean;
  double sigma0 = 0.3;
  Eigen::VectorXd lower, upper;  // box constraints, both sized n
  long max_evaluations = 0;      // 0 = no evaluation budget
  std::optional<double> target_fitness;
  std::uint64_t seed = 0;

  void validate() const;  // BadConfig
};

struct Candidate {
  Eigen::VectorXd genome;
  std::optional<double> fitness;
};

struct GenerationStats {
  long generation = 0;
  long evaluations = 0;
  double sigma = 0.0;
  double best_fitness = 0.0;
  double median_fitness = 0.0;
  Eigen::VectorXd mean;
};

// Covariance-matrix-adaptation evolution strategy in ask/tell form with box
// constraints handled by clipping repair (the objective is evaluated at the
// repaired point). The covariance eigendecomposition is refreshed once per
// generation before sampling; conditioning beyond 1e14 is repaired by
// flooring the small eigenvalues.
class Cmaes {
 public:
  explicit Cmaes(CmaesConfig config);

  // lambda fresh candidates. Does not advance the distribution; only the
  // sampler's RNG state moves.
  std::vector<Candidate> ask();

  // Rank the scored candidates and update mean, paths, covariance and step
  // size. Expects exactly lambda candidates with finite fitness.
  void tell(std::span<const Candidate> scored);

  const Eigen::VectorXd& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  int lambda() const { return lambda_; }
  int mu() const { return mu_; }
  long generation() const { return generation_; }
  long evaluations() const { return evaluations_; }
  const std::optional<Candidate>& best_ever() const { return best_ever_; }

  bool should_stop() const;
  std::string stop_reason() const;
  GenerationStats last_stats() const { return last_stats_; }

 private:
  void refresh_eigen();
  Eigen::VectorXd repair(Eigen::VectorXd x) const;

  CmaesConfig config_;
  int n_ = 0, lambda_ = 0, mu_ = 0;
  Eigen::VectorXd weights_;
  double mu_eff_ = 0.0, c_sigma_ = 0.0, d_sigma_ = 0.0, c_c_ = 0.0,
         c1_ = 0.0, c_mu_ = 0.0, chi_n_ = 0.0;

  Eigen::VectorXd mean_;
  double sigma_ = 0.0;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd eigen_basis_;  // B
  Eigen::VectorXd eigen_scale_;  // sqrt of the eigenvalues (D)
  bool eigen_dirty_ = true;
  Eigen::VectorXd path_sigma_, path_c_;
  long generation_ = 0;
  long evaluations_ = 0;
  std::optional<Candidate> best_ever_;
  GenerationStats last_stats_;
  SeededRng rng_;
};

struct MinimizeResult {
  Eigen::VectorXd best_genome;
  double best_fitness = 0.0;
  long evaluations = 0;
  std::string stop_reason;
  std::vector<GenerationStats> history;
};

// Full loop: ask/evaluate/tell until the budget, target fitness, or step-size
// collapse (sigma * sqrt(max eigenvalue) < 1e-12). Objective exceptions
// propagate with the offending genome appended to the message. When `trace`
// is given, one tab-separated line per generation is written.
MinimizeResult minimize(
    const CmaesConfig& config,
    const std::function<double(const Eigen::VectorXd&)>& objective,
    std::ostream* trace = nullptr);

}  // namespace windcast
