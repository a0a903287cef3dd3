// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/predict.hpp"

#include <atomic>
#include <cmath>

#include "pmgp/laplace.hpp"
#include "pmgp/parallel.hpp"
#include "pmgp/slice.hpp"

namespace pmgp {

namespace {

std::atomic<std::uint64_t> g_negative_variance_events{0};

Eigen::VectorXd cross_covariance(const Eigen::VectorXd& x_star,
                                 const Dataset& data,
                                 const Hyperparams& theta) {
  Eigen::VectorXd k_star(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i)
    k_star[i] = kernel_eval(x_star, data.X.row(i), theta);
  return k_star;
}

double predict_prob_impl(const Eigen::VectorXd& x_star,
                         const Eigen::VectorXd& f, const Hyperparams& theta,
                         const Dataset& data, const GramMatrix& G) {
  const Eigen::VectorXd k_star = cross_covariance(x_star, data, theta);
  const Eigen::VectorXd v =
      G.chol.triangularView<Eigen::Lower>().solve(k_star);
  const Eigen::VectorXd w = G.chol.triangularView<Eigen::Lower>().solve(f);
  const double mean_star = v.dot(w);  // k*^T K^{-1} f
  double var_star = theta.sigma() - v.squaredNorm();
  if (var_star < 0.0) {
    var_star = 0.0;
    g_negative_variance_events.fetch_add(1, std::memory_order_relaxed);
  }
  return std::exp(log_norm_cdf(mean_star / std::sqrt(1.0 + var_star)));
}

Eigen::VectorXd one_latent(const Hyperparams& theta, const Dataset& data,
                           std::size_t ess_iters, RngStream& rng,
                           GramMatrix* G_out) {
  GramMatrix G = gram(data.X, theta);
  LaplaceResult la = laplace_approx(data.y, G, /*with_covariance=*/false);
  Eigen::VectorXd f = la.f_hat;
  if (ess_iters > 0) {
    const GaussianRef prior = GaussianRef::prior(G);
    TemperedTarget posterior{
        &prior,
        [&data](const Eigen::VectorXd& g) { return log_likelihood(g, data.y); },
        1.0};
    for (std::size_t k = 0; k < ess_iters; ++k)
      f = ess_step(f, posterior, rng);
  }
  if (G_out) *G_out = std::move(G);
  return f;
}

}  // namespace

std::vector<Eigen::VectorXd> sample_latents(
    const std::vector<Hyperparams>& theta_samples, const Dataset& data,
    std::size_t ess_iters, RngStream& rng, int n_threads) {
  data.validate();
  std::vector<Eigen::VectorXd> latents(theta_samples.size());
  parallel_for(theta_samples.size(), n_threads, [&](std::size_t i) {
    RngStream sample_rng = rng.substream(i);
    latents[i] = one_latent(theta_samples[i], data, ess_iters, sample_rng, nullptr);
  });
  return latents;
}

double predict_prob(const Eigen::VectorXd& x_star,
                    const Eigen::VectorXd& f_sample,
                    const Hyperparams& theta_sample, const Dataset& data) {
  const GramMatrix G = gram(data.X, theta_sample);
  return predict_prob_impl(x_star, f_sample, theta_sample, data, G);
}

std::uint64_t predict_negative_variance_events() {
  return g_negative_variance_events.load(std::memory_order_relaxed);
}

std::vector<PredictionRow> predictive_table(
    const std::vector<Hyperparams>& theta_samples, const Dataset& data,
    const Eigen::MatrixXd& X_test, std::size_t ess_iters, RngStream& rng,
    int n_threads) {
  data.validate();
  if (X_test.cols() != data.d())
    throw std::invalid_argument("test features have the wrong dimensionality");

  const std::size_t n_test = static_cast<std::size_t>(X_test.rows());
  const std::size_t n_samples = theta_samples.size();
  if (n_samples == 0)
    throw std::invalid_argument("predictive_table: no theta samples");

  // Per-sample probabilities, sample-major so each worker owns a row.
  std::vector<std::vector<double>> probs(n_samples,
                                         std::vector<double>(n_test, 0.0));
  parallel_for(n_samples, n_threads, [&](std::size_t i) {
    RngStream sample_rng = rng.substream(i);
    GramMatrix G;
    const Eigen::VectorXd f =
        one_latent(theta_samples[i], data, ess_iters, sample_rng, &G);
    for (std::size_t j = 0; j < n_test; ++j)
      probs[i][j] = predict_prob_impl(X_test.row(static_cast<Eigen::Index>(j)),
                                      f, theta_samples[i], data, G);
  });

  std::vector<PredictionRow> rows(n_test);
  for (std::size_t j = 0; j < n_test; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) sum += probs[i][j];
    const double mean = sum / static_cast<double>(n_samples);
    double ss = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double dev = probs[i][j] - mean;
      ss += dev * dev;
    }
    const double var = n_samples > 1 ? ss / static_cast<double>(n_samples - 1) : 0.0;
    rows[j] = {j, mean, std::sqrt(var / static_cast<double>(n_samples))};
  }
  return rows;
}

}  // namespace pmgp
