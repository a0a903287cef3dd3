// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pmgp/gaussian.hpp"
#include "pmgp/kernel.hpp"
#include "pmgp/laplace.hpp"
#include "pmgp/rng.hpp"

namespace pmgp {

enum class EstimatorMethod { kIS, kAISPrior, kAISApprox };

std::string to_string(EstimatorMethod m);
EstimatorMethod estimator_method_from_string(const std::string& name);

/// Decreasing inverse temperatures beta_0 = 1 > ... > beta_s = 0.
struct TemperatureSchedule {
  std::vector<double> betas;

  std::size_t segments() const { return betas.empty() ? 0 : betas.size() - 1; }
  void validate() const;
};

/// Geometric schedule for a dataset of size n: s = ceil(sqrt(n)) rounded up
/// to even; s/2 log-uniform values from 1 down to 0.2, s/2 log-uniform values
/// from 0.2 (exclusive) down to 1e-6, then 0. Total s+1 temperatures.
TemperatureSchedule geometric_schedule(std::size_t n);

/// Log of an unbiased marginal-likelihood estimate together with the
/// per-trajectory log weights: log_value = logsumexp(log_weights) - log n_imp.
struct LogMarginalEstimate {
  double log_value = 0.0;
  std::vector<double> log_weights;
  EstimatorMethod method = EstimatorMethod::kIS;
  std::size_t n_imp = 0;
  std::uint64_t ess_stalls = 0;
};

/// log sum_i exp(v_i) by max shift; -inf for all-(-inf) input, throws on empty.
double logsumexp(std::span<const double> v);

/// Importance sampling from the Laplace Gaussian: weights
/// p(y|f) p(f|theta) / q(f). Requires la.converged.
LogMarginalEstimate is_estimate(const Eigen::VectorXd& y, const GramMatrix& G,
                                const LaplaceResult& la, std::size_t n_imp,
                                RngStream& rng, int n_threads = 1);

/// Annealing start: the GP prior N(0, K) or the Laplace Gaussian.
struct AnnealStart {
  const LaplaceResult* la = nullptr;  // null: anneal from the prior

  static AnnealStart from_prior() { return {}; }
  static AnnealStart from_approx(const LaplaceResult& la) { return {&la}; }
};

/// Annealed importance sampling along the given schedule. Each trajectory
/// draws from the reference, applies ess_steps_per_level slice transitions
/// per intermediate level, and accumulates the telescoping log weight.
/// Unbiased for p(y|theta) in both start modes.
LogMarginalEstimate ais_estimate(const Eigen::VectorXd& y, const GramMatrix& G,
                                 AnnealStart start,
                                 const TemperatureSchedule& schedule,
                                 std::size_t n_imp,
                                 std::size_t ess_steps_per_level,
                                 RngStream& rng, int n_threads = 1);

/// Estimator selection used by the chain and the harness.
struct EstimatorConfig {
  EstimatorMethod method = EstimatorMethod::kAISApprox;
  std::size_t n_imp = 1;
  std::size_t ess_steps_per_level = 1;
  int n_threads = 1;

  bool needs_laplace() const { return method != EstimatorMethod::kAISPrior; }
};

/// Dispatches to is_estimate / ais_estimate with the geometric schedule for
/// the dataset size. `la` may be null only for kAISPrior.
LogMarginalEstimate estimate_log_marginal(const EstimatorConfig& config,
                                          const Eigen::VectorXd& y,
                                          const GramMatrix& G,
                                          const LaplaceResult* la,
                                          RngStream& rng);

}  // namespace pmgp
