// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

namespace pmgp {

/// RBF covariance parameters, stored on the log scale. One log length-scale
/// per feature (ARD) or a single global one (isotropic).
struct Hyperparams {
  double log_sigma = 0.0;
  std::vector<double> log_lengthscales{0.0};

  double sigma() const { return std::exp(log_sigma); }
  double lengthscale(std::size_t r) const {
    return std::exp(log_lengthscales.size() == 1 ? log_lengthscales[0]
                                                 : log_lengthscales[r]);
  }
  bool isotropic() const { return log_lengthscales.size() == 1; }
  std::size_t n_params() const { return 1 + log_lengthscales.size(); }

  /// Flattened view (log_sigma, log_tau_1, ...), used by the random-walk
  /// proposal in pm_mcmc.
  Eigen::VectorXd as_vector() const;
  static Hyperparams from_vector(const Eigen::VectorXd& v);

  /// Throws std::invalid_argument if values are non-finite or the
  /// length-scale count is incompatible with d features.
  void validate(Eigen::Index d) const;
};

/// Gram matrix of a dataset together with its (jittered) Cholesky factor.
/// chol * chol^T = K + jitter * I; log_det refers to the jittered matrix.
struct GramMatrix {
  Eigen::MatrixXd K;
  Eigen::MatrixXd chol;
  double jitter = 0.0;
  double log_det = 0.0;

  Eigen::Index n() const { return K.rows(); }

  /// (K + jitter I)^{-1} v via two triangular solves.
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;
};

/// RBF covariance between two points:
///   sigma * exp(-1/2 sum_r (x_ir - x_jr)^2 / tau_r^2).
/// Distances are accumulated per coordinate (no expanded-norm shortcut).
double kernel_eval(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                   const Hyperparams& theta);

/// Builds the n x n Gram matrix and factorizes it with jitter escalation.
/// Throws NumericalError if the factorization fails at the maximum jitter.
GramMatrix gram(const Eigen::MatrixXd& X, const Hyperparams& theta);

struct CholResult {
  Eigen::MatrixXd L;
  double jitter = 0.0;
  double log_det = 0.0;
};

/// Cholesky of a symmetric matrix with escalating diagonal jitter:
/// 0, 1e-10 * scale, then x10 per attempt up to 1e-2 * scale.
CholResult chol_with_jitter(const Eigen::MatrixXd& A, double scale,
                            const char* context);

}  // namespace pmgp
