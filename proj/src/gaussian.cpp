// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/gaussian.hpp"

#include <stdexcept>

namespace pmgp {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

Eigen::VectorXd GaussianRef::sample(RngStream& rng) const {
  Eigen::VectorXd xi = rng.normal_vector(dim());
  return mean + cov_chol.triangularView<Eigen::Lower>() * xi;
}

double GaussianRef::log_pdf(const Eigen::VectorXd& f) const {
  if (f.size() != dim()) throw std::invalid_argument("log_pdf: length mismatch");
  Eigen::VectorXd w = cov_chol.triangularView<Eigen::Lower>().solve(f - mean);
  return -0.5 * w.squaredNorm() - 0.5 * log_det -
         0.5 * static_cast<double>(dim()) * kLogTwoPi;
}

GaussianRef GaussianRef::prior(const GramMatrix& G) {
  GaussianRef ref;
  ref.mean = Eigen::VectorXd::Zero(G.n());
  ref.cov_chol = G.chol;
  ref.log_det = G.log_det;
  return ref;
}

}  // namespace pmgp
