// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "pmgp/gaussian.hpp"

namespace pmgp {

/// Target of the form reference(f) * exp(beta * log_residual(f)), covering
/// the exact posterior (beta = 1, prior reference), prior-annealed levels
/// (residual = log likelihood) and approximation-annealed levels (residual =
/// log prior + log likelihood - log q).
struct TemperedTarget {
  const GaussianRef* reference = nullptr;
  std::function<double(const Eigen::VectorXd&)> log_residual;  // at beta = 1
  double beta = 1.0;

  double tempered_residual(const Eigen::VectorXd& f) const {
    return beta == 0.0 ? 0.0 : beta * log_residual(f);
  }
};

struct EssStats {
  std::uint64_t stalls = 0;
  std::uint64_t contractions = 0;
};

/// One elliptical slice sampling transition. The ellipse passes through the
/// current state and an auxiliary draw from the reference Gaussian, centered
/// at the reference mean; the angle bracket starts at (alpha - 2pi, alpha)
/// and shrinks toward 0 on rejections. If the bracket collapses below 1e-12
/// radians the current state is returned unchanged (counted as a stall).
Eigen::VectorXd ess_step(const Eigen::VectorXd& f, const TemperedTarget& target,
                         RngStream& rng, EssStats* stats = nullptr);

/// Same transition, reusing a cached beta=1 residual value for the current
/// state and updating it in place. Requires beta > 0 (the AIS inner loop).
Eigen::VectorXd ess_step_cached(const Eigen::VectorXd& f, double& residual_f,
                                const TemperedTarget& target, RngStream& rng,
                                EssStats* stats = nullptr);

}  // namespace pmgp
