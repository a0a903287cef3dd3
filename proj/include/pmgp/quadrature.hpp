// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <utility>

#include <Eigen/Core>

#include "pmgp/model.hpp"

namespace pmgp {

/// Gauss-Hermite nodes and weights for weight function exp(-x^2), computed
/// by the Golub-Welsch eigen decomposition of the Jacobi matrix.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n);

/// Tensor-product quadrature of the marginal likelihood
/// integral p(y|f) N(f|0, K+jitter I) df for n <= 3, whitening f = L xi.
/// Throws std::invalid_argument for n > 3.
double quadrature_log_marginal(const Dataset& data, const GramMatrix& G,
                               int nodes_per_axis = 200);
double quadrature_marginal(const Dataset& data, const GramMatrix& G,
                           int nodes_per_axis = 200);

struct PosteriorMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// First two moments of the latent posterior p(f|y, theta) on n <= 3, by the
/// same tensor-product rule. Reference values for sampler checks.
PosteriorMoments quadrature_posterior_moments(const Dataset& data,
                                              const GramMatrix& G,
                                              int nodes_per_axis = 200);

}  // namespace pmgp
