// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Core>

#include "pmgp/kernel.hpp"

namespace pmgp {

/// Binary classification data. Labels are exactly -1 or +1. feature_means and
/// feature_sds record any normalization applied on load; they are zeros/ones
/// when the features are used as-is.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd feature_means;
  Eigen::VectorXd feature_sds;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }
  void validate() const;
};

/// Gamma(shape, rate) hyperpriors on sigma and the length-scales.
struct PriorSpec {
  double sigma_shape = 1.1;
  double sigma_rate = 0.1;
  double tau_shape = 1.0;
  double tau_rate = 1.0;
  bool ard = false;

  static PriorSpec isotropic(Eigen::Index d);  // tau ~ Ga(1, 1/sqrt(d))
  static PriorSpec ard_covariance(Eigen::Index d);  // tau_r ~ Ga(1, 1)
  void validate() const;
};

/// log Phi(x), stable over the full double range: erfc-based for x >= -8,
/// asymptotic expansion below. No underflow to -inf for finite x.
double log_norm_cdf(double x);

/// log of the standard normal density.
double log_norm_pdf(double x);

/// phi(x) / Phi(x), computed from the log forms (stable in the left tail).
double norm_pdf_over_cdf(double x);

/// Gamma(shape, rate) log density at x > 0: a log b - lgamma(a) + (a-1) log x - b x.
double gamma_log_pdf(double x, double shape, double rate);

/// Probit log likelihood: sum_i log Phi(y_i f_i).
double log_likelihood(const Eigen::VectorXd& f, const Eigen::VectorXd& y);

/// log N(f | 0, K + jitter I) via triangular solves against G.chol.
double log_gp_prior(const Eigen::VectorXd& f, const GramMatrix& G);

/// Hyperprior density over the *log* parameters: Gamma log densities at sigma
/// and each tau plus the change-of-variables terms (+log sigma, +sum log tau).
double log_hyperprior(const Hyperparams& theta, const PriorSpec& p);

/// log p(y|f) + log N(f | 0, K): the unnormalized latent posterior.
double log_unnorm_posterior_f(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                              const GramMatrix& G);

/// Draws (log sigma, log tau_1..) from the hyperprior.
Hyperparams draw_from_hyperprior(const PriorSpec& p, Eigen::Index d,
                                 class RngStream& rng);

}  // namespace pmgp
