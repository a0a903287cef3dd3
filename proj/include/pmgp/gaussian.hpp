// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Core>

#include "pmgp/kernel.hpp"
#include "pmgp/rng.hpp"

namespace pmgp {

/// A multivariate Gaussian N(mean, L L^T) stored by its lower Cholesky
/// factor. Serves as the GP prior or as a Laplace approximation; immutable
/// after construction and safe to share across threads.
struct GaussianRef {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov_chol;  // lower triangular, strictly positive diagonal
  double log_det = 0.0;      // log |L L^T|

  Eigen::Index dim() const { return mean.size(); }

  /// mean + L xi with xi standard normal.
  Eigen::VectorXd sample(RngStream& rng) const;
  double log_pdf(const Eigen::VectorXd& f) const;

  /// N(0, K + jitter I) built from a Gram matrix.
  static GaussianRef prior(const GramMatrix& G);
};

}  // namespace pmgp
