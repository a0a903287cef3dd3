// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/slice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pmgp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinBracket = 1e-12;
}  // namespace

Eigen::VectorXd ess_step_cached(const Eigen::VectorXd& f, double& residual_f,
                                const TemperedTarget& target, RngStream& rng,
                                EssStats* stats) {
  if (target.beta <= 0.0)
    throw std::invalid_argument("ess_step_cached requires beta > 0");
  if (!std::isfinite(residual_f))
    throw std::invalid_argument("ess_step: residual at current state not finite");

  const Eigen::VectorXd& m = target.reference->mean;
  const Eigen::VectorXd z = target.reference->sample(rng);
  const double threshold = target.beta * residual_f + std::log(rng.uniform());

  double alpha = rng.uniform(0.0, kTwoPi);
  double lo = alpha - kTwoPi;
  double hi = alpha;

  for (;;) {
    const Eigen::VectorXd proposal =
        m + (f - m) * std::cos(alpha) + (z - m) * std::sin(alpha);
    const double res = target.log_residual(proposal);
    if (target.beta * res > threshold) {
      residual_f = res;
      return proposal;
    }
    if (alpha < 0.0)
      lo = alpha;
    else
      hi = alpha;
    if (stats) ++stats->contractions;
    if (hi - lo < kMinBracket) {
      if (stats) ++stats->stalls;
      return f;  // lazy but valid transition; residual_f already correct
    }
    alpha = rng.uniform(lo, hi);
  }
}

Eigen::VectorXd ess_step(const Eigen::VectorXd& f, const TemperedTarget& target,
                         RngStream& rng, EssStats* stats) {
  if (target.beta == 0.0) {
    // Residual is identically zero: the first proposal always clears the
    // threshold, so the step reduces to a fresh ellipse point.
    const Eigen::VectorXd& m = target.reference->mean;
    const Eigen::VectorXd z = target.reference->sample(rng);
    rng.uniform();  // threshold draw, kept for stream alignment
    const double alpha = rng.uniform(0.0, kTwoPi);
    return m + (f - m) * std::cos(alpha) + (z - m) * std::sin(alpha);
  }
  double residual = target.log_residual(f);
  return ess_step_cached(f, residual, target, rng, stats);
}

}  // namespace pmgp
