// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/synthetic.hpp"

#include <cmath>
#include <cstdlib>

#include "pmgp/errors.hpp"
#include "pmgp/gaussian.hpp"
#include "pmgp/rng.hpp"

namespace pmgp {

Dataset gen_synthetic(std::size_t n, double sigma, double tau,
                      std::uint64_t seed, Eigen::VectorXd* latents) {
  if (n < 2) throw std::invalid_argument("gen_synthetic: need n >= 2");
  if (sigma <= 0 || tau <= 0)
    throw std::invalid_argument("gen_synthetic: sigma and tau must be positive");

  RngStream rng(seed);
  const Eigen::Index rows = static_cast<Eigen::Index>(n);

  Dataset data;
  data.X.resize(rows, 2);
  for (Eigen::Index i = 0; i < rows; ++i) {
    data.X(i, 0) = rng.uniform();
    data.X(i, 1) = rng.uniform();
  }
  data.feature_means = Eigen::VectorXd::Zero(2);
  data.feature_sds = Eigen::VectorXd::Ones(2);

  Hyperparams theta;
  theta.log_sigma = std::log(sigma);
  theta.log_lengthscales = {std::log(tau)};
  const GramMatrix G = gram(data.X, theta);
  const GaussianRef prior = GaussianRef::prior(G);

  const double half = static_cast<double>(n) / 2.0;
  const double tolerance = std::max(1.0, 0.05 * static_cast<double>(n));

  data.y.resize(rows);
  for (int redraw = 0; redraw < 1000; ++redraw) {
    const Eigen::VectorXd f = prior.sample(rng);
    std::size_t positives = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double p = std::exp(log_norm_cdf(f[i]));
      data.y[i] = rng.uniform() < p ? 1.0 : -1.0;
      if (data.y[i] > 0) ++positives;
    }
    if (std::abs(static_cast<double>(positives) - half) <= tolerance) {
      if (latents) *latents = f;
      return data;
    }
  }
  throw NumericalError(
      "gen_synthetic: no balanced label draw within 1000 attempts");
}

}  // namespace pmgp
