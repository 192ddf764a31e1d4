#include "windcast/cmaes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "windcast/csv.hpp"
#include "windcast/errors.hpp"

namespace windcast {

namespace {

constexpr double kConditionLimit = 1e14;
constexpr double kSigmaCollapse = 1e-12;

}  // namespace

void CmaesConfig::validate() const {
  if (dimension < 1) raise(ErrorCode::bad_config, "dimension must be >= 1");
  if (lambda < 0 || mu < 0) {
    raise(ErrorCode::bad_config, "lambda and mu must be >= 0 (0 = default)");
  }
  const int lam = lambda == 0
                      ? 4 + static_cast<int>(std::floor(
                                3.0 * std::log(static_cast<double>(dimension))))
                      : lambda;
  if (lam < 4) raise(ErrorCode::bad_config, "lambda must be >= 4");
  const int m = mu == 0 ? lam / 2 : mu;
  if (m < 1 || m > lam) raise(ErrorCode::bad_config, "need 1 <= mu <= lambda");
  if (initial_mean.size() != dimension) {
    raise(ErrorCode::bad_config, "initial mean has wrong dimension");
  }
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    raise(ErrorCode::bad_config, "sigma0 must be positive");
  }
  if (lower.size() != dimension || upper.size() != dimension) {
    raise(ErrorCode::bad_config, "bounds must match the dimension");
  }
  for (int i = 0; i < dimension; ++i) {
    if (!(lower(i) < upper(i))) {
      raise(ErrorCode::bad_config,
            "lower bound must be below upper bound in coordinate " +
                std::to_string(i));
    }
    if (initial_mean(i) < lower(i) || initial_mean(i) > upper(i)) {
      raise(ErrorCode::bad_config, "initial mean outside the box");
    }
  }
  if (max_evaluations < 0) {
    raise(ErrorCode::bad_config, "max_evaluations must be >= 0");
  }
}

Cmaes::Cmaes(CmaesConfig config)
    : config_(std::move(config)), rng_(config_.seed) {
  config_.validate();
  n_ = config_.dimension;
  lambda_ = config_.lambda == 0
                ? 4 + static_cast<int>(std::floor(
                          3.0 * std::log(static_cast<double>(n_))))
                : config_.lambda;
  mu_ = config_.mu == 0 ? lambda_ / 2 : config_.mu;

  // log-linear recombination weights, normalized to sum 1
  weights_.resize(mu_);
  for (int i = 0; i < mu_; ++i) {
    weights_(i) = std::log(static_cast<double>(mu_) + 0.5) -
                  std::log(static_cast<double>(i + 1));
  }
  weights_ /= weights_.sum();
  mu_eff_ = 1.0 / weights_.squaredNorm();

  const double n = static_cast<double>(n_);
  c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  d_sigma_ = 1.0 +
             2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) +
             c_sigma_;
  c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
  c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
  c_mu_ = std::min(1.0 - c1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                  ((n + 2.0) * (n + 2.0) + mu_eff_));
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  mean_ = config_.initial_mean;
  sigma_ = config_.sigma0;
  cov_ = Eigen::MatrixXd::Identity(n_, n_);
  path_sigma_ = Eigen::VectorXd::Zero(n_);
  path_c_ = Eigen::VectorXd::Zero(n_);
  eigen_dirty_ = true;
}

void Cmaes::refresh_eigen() {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_);
  if (solver.info() != Eigen::Success) {
    raise(ErrorCode::non_finite_fitness, "covariance eigendecomposition failed");
  }
  Eigen::VectorXd eigenvalues = solver.eigenvalues();
  const double max_ev = eigenvalues.maxCoeff();
  if (!(max_ev > 0.0) || !eigenvalues.allFinite()) {
    raise(ErrorCode::non_finite_fitness, "covariance lost positive definiteness");
  }
  // Conditioning repair: floor tiny or negative eigenvalues and rebuild C.
  const double floor_ev = max_ev / kConditionLimit;
  if (eigenvalues.minCoeff() < floor_ev) {
    eigenvalues = eigenvalues.cwiseMax(floor_ev);
    cov_ = solver.eigenvectors() * eigenvalues.asDiagonal() *
           solver.eigenvectors().transpose();
    cov_ = (0.5 * (cov_ + cov_.transpose())).eval();
  }
  eigen_basis_ = solver.eigenvectors();
  eigen_scale_ = eigenvalues.cwiseSqrt();
  eigen_dirty_ = false;
}

Eigen::VectorXd Cmaes::repair(Eigen::VectorXd x) const {
  for (int i = 0; i < n_; ++i) {
    x(i) = std::clamp(x(i), config_.lower(i), config_.upper(i));
  }
  return x;
}

std::vector<Candidate> Cmaes::ask() {
  if (eigen_dirty_) refresh_eigen();
  std::vector<Candidate> out(static_cast<std::size_t>(lambda_));
  Eigen::VectorXd z(n_);
  for (auto& candidate : out) {
    for (int i = 0; i < n_; ++i) z(i) = rng_.gauss();
    candidate.genome =
        repair(mean_ + sigma_ * (eigen_basis_ *
                                 (eigen_scale_.array() * z.array()).matrix()));
  }
  return out;
}

void Cmaes::tell(std::span<const Candidate> scored) {
  if (static_cast<int>(scored.size()) != lambda_) {
    raise(ErrorCode::bad_config,
          "tell expects " + std::to_string(lambda_) + " candidates, got " +
              std::to_string(scored.size()));
  }
  for (const Candidate& c : scored) {
    if (!c.fitness.has_value() || !std::isfinite(*c.fitness)) {
      raise(ErrorCode::non_finite_fitness,
            "every candidate needs a finite fitness");
    }
    if (c.genome.size() != n_) {
      raise(ErrorCode::bad_config, "candidate genome has wrong dimension");
    }
  }
  if (eigen_dirty_) refresh_eigen();

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *scored[a].fitness < *scored[b].fitness;
  });

  const Eigen::VectorXd old_mean = mean_;
  Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n_);
  std::vector<Eigen::VectorXd> y(static_cast<std::size_t>(mu_));
  for (int i = 0; i < mu_; ++i) {
    y[static_cast<std::size_t>(i)] =
        (scored[order[static_cast<std::size_t>(i)]].genome - old_mean) / sigma_;
    y_w += weights_(i) * y[static_cast<std::size_t>(i)];
  }
  mean_ = old_mean + sigma_ * y_w;

  // C^(-1/2) y_w in the eigenbasis of the sampling covariance.
  const Eigen::VectorXd c_inv_sqrt_yw =
      eigen_basis_ *
      ((eigen_basis_.transpose() * y_w).array() / eigen_scale_.array())
          .matrix();
  path_sigma_ = (1.0 - c_sigma_) * path_sigma_ +
                std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * c_inv_sqrt_yw;

  const double expected_decay =
      std::sqrt(1.0 - std::pow(1.0 - c_sigma_,
                               2.0 * static_cast<double>(generation_ + 1)));
  const bool h_sigma =
      path_sigma_.norm() / expected_decay <
      (1.4 + 2.0 / (static_cast<double>(n_) + 1.0)) * chi_n_;

  path_c_ = (1.0 - c_c_) * path_c_;
  if (h_sigma) {
    path_c_ += std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) * y_w;
  }

  Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < mu_; ++i) {
    rank_mu.noalias() += weights_(i) * y[static_cast<std::size_t>(i)] *
                         y[static_cast<std::size_t>(i)].transpose();
  }
  const double missing_mass = h_sigma ? 0.0 : c_c_ * (2.0 - c_c_);
  cov_ = (1.0 - c1_ - c_mu_) * cov_ +
         c1_ * (path_c_ * path_c_.transpose() + missing_mass * cov_) +
         c_mu_ * rank_mu;
  cov_ = (0.5 * (cov_ + cov_.transpose())).eval();

  sigma_ *= std::exp((c_sigma_ / d_sigma_) *
                     (path_sigma_.norm() / chi_n_ - 1.0));

  ++generation_;
  evaluations_ += lambda_;
  eigen_dirty_ = true;

  const std::size_t best_idx = order.front();
  if (!best_ever_ || *scored[best_idx].fitness < *best_ever_->fitness) {
    best_ever_ = scored[best_idx];
  }

  std::vector<double> fitnesses;
  fitnesses.reserve(scored.size());
  for (const Candidate& c : scored) fitnesses.push_back(*c.fitness);
  std::sort(fitnesses.begin(), fitnesses.end());
  const std::size_t h = fitnesses.size() / 2;
  last_stats_.generation = generation_;
  last_stats_.evaluations = evaluations_;
  last_stats_.sigma = sigma_;
  last_stats_.best_fitness = fitnesses.front();
  last_stats_.median_fitness = fitnesses.size() % 2 == 1
                                   ? fitnesses[h]
                                   : 0.5 * (fitnesses[h - 1] + fitnesses[h]);
  last_stats_.mean = mean_;
}

bool Cmaes::should_stop() const { return !stop_reason().empty(); }

std::string Cmaes::stop_reason() const {
  if (config_.max_evaluations > 0 && evaluations_ >= config_.max_evaluations) {
    return "max_evaluations";
  }
  if (config_.target_fitness && best_ever_ &&
      *best_ever_->fitness <= *config_.target_fitness) {
    return "target_fitness";
  }
  if (generation_ > 0) {
    // largest axis of the search distribution
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_);
    if (solver.info() == Eigen::Success &&
        sigma_ * std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff())) <
            kSigmaCollapse) {
      return "sigma_collapse";
    }
  }
  return {};
}

namespace {

std::string genome_to_string(const Eigen::VectorXd& genome) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < genome.size(); ++i) {
    out << (i ? ", " : "") << format_double(genome(i));
  }
  return out.str();
}

}  // namespace

MinimizeResult minimize(
    const CmaesConfig& config,
    const std::function<double(const Eigen::VectorXd&)>& objective,
    std::ostream* trace) {
  if (config.max_evaluations <= 0 && !config.target_fitness) {
    raise(ErrorCode::bad_config,
          "minimize needs an evaluation budget or a target fitness");
  }
  Cmaes es(config);
  if (trace) {
    *trace << "# generation\tevaluations\tsigma\tbest_fitness\tmedian_fitness";
    for (int i = 0; i < config.dimension; ++i) *trace << "\tmean" << i;
    *trace << "\n";
  }

  MinimizeResult result;
  while (!es.should_stop()) {
    std::vector<Candidate> population = es.ask();
    for (Candidate& candidate : population) {
      try {
        candidate.fitness = objective(candidate.genome);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (genome [" +
                                  genome_to_string(candidate.genome) + "])");
      }
    }
    es.tell(population);

    const GenerationStats stats = es.last_stats();
    result.history.push_back(stats);
    if (trace) {
      *trace << stats.generation << '\t' << stats.evaluations << '\t'
             << format_double(stats.sigma) << '\t'
             << format_double(stats.best_fitness) << '\t'
             << format_double(stats.median_fitness);
      for (Eigen::Index i = 0; i < stats.mean.size(); ++i) {
        *trace << '\t' << format_double(stats.mean(i));
      }
      *trace << "\n";
    }
  }

  result.stop_reason = es.stop_reason();
  result.evaluations = es.evaluations();
  if (es.best_ever()) {
    result.best_genome = es.best_ever()->genome;
    result.best_fitness = *es.best_ever()->fitness;
  }
  return result;
}

}  // namespace windcast
