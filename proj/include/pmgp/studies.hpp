// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pmgp/estimators.hpp"
#include "pmgp/pm_mcmc.hpp"

namespace pmgp {

/// Spread of the log10 marginal-likelihood estimator over repeated calls:
/// the sample standard deviation of log10 estimates across `reps` independent
/// estimator runs. Any -inf estimate yields +inf (logged via the result).
double r_statistic(const Dataset& data, const Hyperparams& theta,
                   const EstimatorConfig& config, std::size_t reps,
                   RngStream& rng);

/// Injection point used by tests (e.g. a zero-variance oracle).
double r_statistic_with(const Dataset& data, const Hyperparams& theta,
                        std::size_t reps, RngStream& rng,
                        const MarginalEstimator& estimator,
                        bool needs_laplace);

struct RStudyResult {
  std::size_t n = 0;
  EstimatorMethod method = EstimatorMethod::kIS;
  std::vector<double> r_values;  // one per posterior theta draw
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct RStudyOptions {
  std::vector<std::size_t> n_list = {10, 50, 100, 500, 1000};
  std::vector<EstimatorMethod> methods = {EstimatorMethod::kIS,
                                          EstimatorMethod::kAISPrior,
                                          EstimatorMethod::kAISApprox};
  std::size_t n_imp = 4;
  std::size_t reps = 50;
  std::size_t n_theta_draws = 50;
  double sigma = 20.0;
  double tau = 0.255;
  // Preliminary chain used to draw thetas from the posterior.
  std::size_t prelim_warmup = 800;
  std::size_t prelim_iters = 1000;
  std::size_t prelim_burnin = 200;
  int n_threads = 1;
};

/// Variance study on synthetic data: per n, draw thetas from the posterior
/// with a preliminary AIS-approx chain, then compute r for every (theta,
/// method) pair.
std::vector<RStudyResult> r_study(const RStudyOptions& options,
                                  std::uint64_t seed);

/// CSV: method, n, theta_index, r.
void write_rstudy_csv(std::ostream& out, std::span<const RStudyResult> results,
                      std::span<const std::string> comment_lines);

struct BenchmarkRow {
  std::string dataset;
  std::string covariance;  // "iso" or "ard"
  EstimatorMethod method = EstimatorMethod::kIS;
  std::size_t n_imp = 1;
  double mean_acceptance = 0.0;  // percent
  double sd_acceptance = 0.0;    // across chains, percent
  std::vector<double> per_chain;
};

/// Full pipeline on one dataset: warm-up, then parallel chains; reports the
/// mean and standard deviation of the per-chain acceptance rates.
BenchmarkRow acceptance_benchmark(const Dataset& data,
                                  const std::string& dataset_name,
                                  bool ard, EstimatorMethod method,
                                  std::size_t n_imp, std::uint64_t seed,
                                  const ChainConfig& base_config);

void write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRow> rows,
                         std::span<const std::string> comment_lines);

double median_of(std::vector<double> values);

}  // namespace pmgp
