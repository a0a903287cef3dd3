// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Core>

#include "pmgp/gaussian.hpp"
#include "pmgp/kernel.hpp"

namespace pmgp {

/// Gaussian approximation to the latent posterior found by Newton's method,
/// plus the Laplace estimate of the log marginal likelihood.
struct LaplaceResult {
  GaussianRef q;               // N(f_hat, (K^-1 + W)^-1); empty if !with_covariance
  Eigen::VectorXd f_hat;
  double log_marginal_la = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Newton iteration at f = 0 in the stable B = I + W^{1/2} K W^{1/2}
/// parameterization, with step halving on the objective. `with_covariance`
/// controls whether the O(n^3) posterior covariance is assembled; callers
/// that only need log_marginal_la (proposal adaptation) pass false.
LaplaceResult laplace_approx(const Eigen::VectorXd& y, const GramMatrix& G,
                             bool with_covariance = true);

}  // namespace pmgp
