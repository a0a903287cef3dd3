// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pmgp/model.hpp"
#include "pmgp/rng.hpp"

namespace pmgp {

/// For each theta sample, runs ess_iters exact-posterior slice transitions
/// warm-started at the Laplace mode and returns one latent vector per theta.
/// ess_iters = 0 returns the Laplace modes themselves.
std::vector<Eigen::VectorXd> sample_latents(
    const std::vector<Hyperparams>& theta_samples, const Dataset& data,
    std::size_t ess_iters, RngStream& rng, int n_threads = 1);

/// Predictive class-+1 probability for one (f, theta) sample:
/// Phi(m* / sqrt(1 + v*)) with m* = k*^T K^{-1} f and v* = k** - k*^T K^{-1} k*.
/// Negative v* from round-off is clamped to zero (counted, see below).
double predict_prob(const Eigen::VectorXd& x_star, const Eigen::VectorXd& f_sample,
                    const Hyperparams& theta_sample, const Dataset& data);

/// Count of v* < 0 clamp events since process start.
std::uint64_t predict_negative_variance_events();

struct PredictionRow {
  std::size_t test_index = 0;
  double mean_prob = 0.0;
  double mc_std_error = 0.0;
};

/// Monte Carlo predictive table over paired (theta, f) samples: for each test
/// point, the mean of per-sample probabilities and its standard error.
/// Latents are drawn as in sample_latents; theta samples are processed
/// streaming so chain-length inputs do not hold n x n matrices per sample.
std::vector<PredictionRow> predictive_table(
    const std::vector<Hyperparams>& theta_samples, const Dataset& data,
    const Eigen::MatrixXd& X_test, std::size_t ess_iters, RngStream& rng,
    int n_threads = 1);

}  // namespace pmgp
