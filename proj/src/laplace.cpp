// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/laplace.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "pmgp/errors.hpp"
#include "pmgp/model.hpp"

namespace pmgp {

namespace {

constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 20;
constexpr double kObjectiveTol = 1e-9;
constexpr double kGradientTol = 1e-6;
constexpr double kMinW = 1e-12;

struct LikelihoodDerivs {
  Eigen::VectorXd grad;  // d/df log p(y|f)
  Eigen::VectorXd w;     // -d^2/df^2 log p(y|f), floored at kMinW
};

LikelihoodDerivs probit_derivs(const Eigen::VectorXd& f,
                               const Eigen::VectorXd& y) {
  const Eigen::Index n = f.size();
  LikelihoodDerivs d{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = y[i] * f[i];
    const double r = norm_pdf_over_cdf(z);
    d.grad[i] = y[i] * r;
    d.w[i] = std::max(r * (r + z), kMinW);
  }
  return d;
}

// psi(f) = log p(y|f) - 1/2 f^T K~^{-1} f, dropping constants.
double objective(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                 const GramMatrix& G) {
  Eigen::VectorXd w = G.chol.triangularView<Eigen::Lower>().solve(f);
  return log_likelihood(f, y) - 0.5 * w.squaredNorm();
}

}  // namespace

LaplaceResult laplace_approx(const Eigen::VectorXd& y, const GramMatrix& G,
                             bool with_covariance) {
  const Eigen::Index n = G.n();
  if (y.size() != n) throw std::invalid_argument("laplace_approx: length mismatch");

  Eigen::MatrixXd Kj = G.K;
  if (G.jitter > 0.0) Kj.diagonal().array() += G.jitter;

  LaplaceResult res;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  double psi = objective(f, y, G);

  for (int it = 1; it <= kMaxIterations; ++it) {
    res.iterations = it;
    const LikelihoodDerivs d = probit_derivs(f, y);
    const Eigen::VectorXd grad = d.grad - G.solve(f);
    const double f_scale = std::max(1.0, f.lpNorm<Eigen::Infinity>());
    if (grad.lpNorm<Eigen::Infinity>() < kGradientTol * f_scale) {
      res.converged = true;
      break;
    }

    const Eigen::VectorXd sqrt_w = d.w.cwiseSqrt();
    Eigen::MatrixXd B = sqrt_w.asDiagonal() * Kj * sqrt_w.asDiagonal();
    B.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt_b(B);
    if (llt_b.info() != Eigen::Success)
      throw NumericalError("laplace_approx: Cholesky of B failed");

    const Eigen::VectorXd b = d.w.cwiseProduct(f) + d.grad;
    const Eigen::VectorXd v = llt_b.solve(sqrt_w.cwiseProduct(Kj * b));
    const Eigen::VectorXd a = b - sqrt_w.cwiseProduct(v);
    const Eigen::VectorXd step = Kj * a - f;

    // Step halving keeps the objective non-decreasing.
    double t = 1.0;
    Eigen::VectorXd f_new = f + step;
    double psi_new = objective(f_new, y, G);
    int halvings = 0;
    while (psi_new < psi && halvings < kMaxHalvings) {
      t *= 0.5;
      f_new = f + t * step;
      psi_new = objective(f_new, y, G);
      ++halvings;
    }
    if (psi_new < psi) {
      // Objective at its floating-point floor. Converged if the proposed
      // Newton step itself was negligible.
      res.converged = step.lpNorm<Eigen::Infinity>() < kGradientTol * f_scale;
      break;
    }

    const bool plateau =
        std::abs(psi_new - psi) < kObjectiveTol * (1.0 + std::abs(psi_new));
    f = std::move(f_new);
    psi = psi_new;
    if (plateau) {
      res.converged = true;
      break;
    }
  }

  res.f_hat = f;

  const LikelihoodDerivs d = probit_derivs(f, y);
  const Eigen::VectorXd sqrt_w = d.w.cwiseSqrt();
  Eigen::MatrixXd B = sqrt_w.asDiagonal() * Kj * sqrt_w.asDiagonal();
  B.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt_b(B);
  if (llt_b.info() != Eigen::Success)
    throw NumericalError("laplace_approx: Cholesky of B failed");

  const Eigen::VectorXd wf = G.chol.triangularView<Eigen::Lower>().solve(f);
  const double half_log_det_b =
      Eigen::MatrixXd(llt_b.matrixL()).diagonal().array().log().sum();
  res.log_marginal_la =
      -0.5 * wf.squaredNorm() + log_likelihood(f, y) - half_log_det_b;

  if (with_covariance) {
    // Sigma = K~ - K~ W^{1/2} B^{-1} W^{1/2} K~, factorized with the shared
    // jitter escalation path.
    const Eigen::MatrixXd C = sqrt_w.asDiagonal() * Kj;
    const Eigen::MatrixXd Sigma = Kj - C.transpose() * llt_b.solve(C);
    const double scale = Sigma.diagonal().maxCoeff();
    CholResult chol = chol_with_jitter(Sigma, std::max(scale, 1e-300),
                                       "laplace_approx covariance");
    res.q.mean = f;
    res.q.cov_chol = std::move(chol.L);
    res.q.log_det = chol.log_det;
  }
  return res;
}

}  // namespace pmgp
