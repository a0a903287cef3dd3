// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/kernel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "pmgp/errors.hpp"

namespace pmgp {

Eigen::VectorXd Hyperparams::as_vector() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n_params()));
  v[0] = log_sigma;
  for (std::size_t r = 0; r < log_lengthscales.size(); ++r)
    v[static_cast<Eigen::Index>(r) + 1] = log_lengthscales[r];
  return v;
}

Hyperparams Hyperparams::from_vector(const Eigen::VectorXd& v) {
  if (v.size() < 2) throw std::invalid_argument("hyperparameter vector needs log_sigma and at least one log length-scale");
  Hyperparams theta;
  theta.log_sigma = v[0];
  theta.log_lengthscales.assign(v.data() + 1, v.data() + v.size());
  return theta;
}

void Hyperparams::validate(Eigen::Index d) const {
  if (!std::isfinite(log_sigma))
    throw std::invalid_argument("log_sigma must be finite");
  for (double v : log_lengthscales)
    if (!std::isfinite(v))
      throw std::invalid_argument("log length-scales must be finite");
  const auto n_ls = static_cast<Eigen::Index>(log_lengthscales.size());
  if (n_ls != 1 && n_ls != d) {
    std::ostringstream msg;
    msg << "expected 1 or " << d << " log length-scales, got " << n_ls;
    throw std::invalid_argument(msg.str());
  }
}

double kernel_eval(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                   const Hyperparams& theta) {
  if (xi.size() != xj.size())
    throw std::invalid_argument("kernel_eval: input dimensions differ");
  theta.validate(xi.size());
  double q = 0.0;
  for (Eigen::Index r = 0; r < xi.size(); ++r) {
    const double dr = xi[r] - xj[r];
    const double tau = theta.lengthscale(static_cast<std::size_t>(r));
    q += (dr * dr) / (tau * tau);
  }
  return theta.sigma() * std::exp(-0.5 * q);
}

CholResult chol_with_jitter(const Eigen::MatrixXd& A, double scale,
                            const char* context) {
  double jitter = 0.0;
  const double max_jitter = 1e-2 * scale;
  // Smallest acceptable squared pivot: LLT can "succeed" on a singular
  // matrix with a round-off pivot, which would poison later solves.
  const double min_pivot_sq = static_cast<double>(A.rows()) *
                              std::numeric_limits<double>::epsilon() * scale;
  for (;;) {
    Eigen::MatrixXd M = A;
    if (jitter > 0.0) M.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() == Eigen::Success) {
      CholResult res;
      res.L = llt.matrixL();
      res.jitter = jitter;
      res.log_det = 2.0 * res.L.diagonal().array().log().sum();
      const double min_diag = res.L.diagonal().minCoeff();
      if (std::isfinite(res.log_det) && min_diag * min_diag >= min_pivot_sq)
        return res;
    }
    if (jitter == 0.0) {
      jitter = 1e-10 * scale;
    } else if (jitter < max_jitter) {
      jitter = std::min(jitter * 10.0, max_jitter);
    } else {
      std::ostringstream msg;
      msg << context << ": Cholesky failed at maximum jitter " << max_jitter;
      throw NumericalError(msg.str());
    }
  }
}

GramMatrix gram(const Eigen::MatrixXd& X, const Hyperparams& theta) {
  const Eigen::Index n = X.rows();
  if (n < 1) throw std::invalid_argument("gram: need at least one data point");
  theta.validate(X.cols());

  Eigen::MatrixXd K(n, n);
  const double sigma = theta.sigma();
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = sigma;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double k = kernel_eval(X.row(i), X.row(j), theta);
      K(i, j) = k;
      K(j, i) = k;
    }
  }

  CholResult chol;
  try {
    chol = chol_with_jitter(K, sigma, "gram");
  } catch (const NumericalError&) {
    std::ostringstream msg;
    msg << "gram: Cholesky failed at maximum jitter for log_sigma="
        << theta.log_sigma << ", log_tau=[";
    for (std::size_t r = 0; r < theta.log_lengthscales.size(); ++r)
      msg << (r ? ", " : "") << theta.log_lengthscales[r];
    msg << "]";
    throw NumericalError(msg.str());
  }

  GramMatrix G;
  G.K = std::move(K);
  G.chol = std::move(chol.L);
  G.jitter = chol.jitter;
  G.log_det = chol.log_det;
  return G;
}

Eigen::VectorXd GramMatrix::solve(const Eigen::VectorXd& v) const {
  Eigen::VectorXd w = chol.triangularView<Eigen::Lower>().solve(v);
  return chol.transpose().triangularView<Eigen::Upper>().solve(w);
}

}  // namespace pmgp
