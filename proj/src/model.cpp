// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pmgp/rng.hpp"

namespace pmgp {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)
}  // namespace

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    throw std::invalid_argument("dataset must have n >= 1 and d >= 1");
  if (y.size() != X.rows())
    throw std::invalid_argument("label count does not match row count");
  if (!X.allFinite())
    throw std::invalid_argument("features contain non-finite entries");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 1.0 && y[i] != -1.0)
      throw std::invalid_argument("labels must be exactly -1 or +1");
}

PriorSpec PriorSpec::isotropic(Eigen::Index d) {
  PriorSpec p;
  p.tau_rate = 1.0 / std::sqrt(static_cast<double>(d));
  p.ard = false;
  return p;
}

PriorSpec PriorSpec::ard_covariance(Eigen::Index) {
  PriorSpec p;
  p.tau_shape = 1.0;
  p.tau_rate = 1.0;
  p.ard = true;
  return p;
}

void PriorSpec::validate() const {
  if (sigma_shape <= 0 || sigma_rate <= 0 || tau_shape <= 0 || tau_rate <= 0)
    throw std::invalid_argument("Gamma shapes and rates must be positive");
}

double log_norm_pdf(double x) { return -0.5 * x * x - 0.5 * kLogTwoPi; }

double log_norm_cdf(double x) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  if (x >= 0.0) {
    // Phi(x) = 1 - Phi(-x); log1p keeps full precision for x large.
    return std::log1p(-0.5 * std::erfc(x * inv_sqrt2));
  }
  if (x >= -8.0) {
    return std::log(0.5 * std::erfc(-x * inv_sqrt2));
  }
  // Asymptotic expansion: Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - ...).
  const double inv = 1.0 / (x * x);
  const double series =
      inv * (-1.0 + inv * (3.0 + inv * (-15.0 + inv * (105.0 - inv * 945.0))));
  return -0.5 * x * x - 0.5 * kLogTwoPi - std::log(-x) + std::log1p(series);
}

double norm_pdf_over_cdf(double x) {
  return std::exp(log_norm_pdf(x) - log_norm_cdf(x));
}

double gamma_log_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double log_likelihood(const Eigen::VectorXd& f, const Eigen::VectorXd& y) {
  if (f.size() != y.size())
    throw std::invalid_argument("log_likelihood: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    total += log_norm_cdf(y[i] * f[i]);
  return total;
}

double log_gp_prior(const Eigen::VectorXd& f, const GramMatrix& G) {
  if (f.size() != G.n())
    throw std::invalid_argument("log_gp_prior: length mismatch");
  Eigen::VectorXd w = G.chol.triangularView<Eigen::Lower>().solve(f);
  return -0.5 * w.squaredNorm() - 0.5 * G.log_det -
         0.5 * static_cast<double>(f.size()) * kLogTwoPi;
}

double log_hyperprior(const Hyperparams& theta, const PriorSpec& p) {
  p.validate();
  if (!p.ard && theta.log_lengthscales.size() != 1)
    throw std::invalid_argument(
        "isotropic prior expects a single log length-scale");
  // Gamma density at e^u plus the Jacobian term +u, so the result is a
  // density over the log parameters (the space the MH chain walks in).
  auto log_space_gamma = [](double u, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) + shape * u -
           rate * std::exp(u);
  };
  double total = log_space_gamma(theta.log_sigma, p.sigma_shape, p.sigma_rate);
  for (double u : theta.log_lengthscales)
    total += log_space_gamma(u, p.tau_shape, p.tau_rate);
  return total;
}

double log_unnorm_posterior_f(const Eigen::VectorXd& f,
                              const Eigen::VectorXd& y, const GramMatrix& G) {
  return log_likelihood(f, y) + log_gp_prior(f, G);
}

Hyperparams draw_from_hyperprior(const PriorSpec& p, Eigen::Index d,
                                 RngStream& rng) {
  Hyperparams theta;
  theta.log_sigma = std::log(rng.gamma(p.sigma_shape, p.sigma_rate));
  const std::size_t n_tau = p.ard ? static_cast<std::size_t>(d) : 1;
  theta.log_lengthscales.resize(n_tau);
  for (std::size_t r = 0; r < n_tau; ++r)
    theta.log_lengthscales[r] = std::log(rng.gamma(p.tau_shape, p.tau_rate));
  return theta;
}

}  // namespace pmgp
