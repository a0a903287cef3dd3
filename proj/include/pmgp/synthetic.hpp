// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "pmgp/model.hpp"

namespace pmgp {

/// Two-dimensional synthetic classification data: inputs uniform on the unit
/// square, latent function drawn from the GP prior, labels y_i = +1 with
/// probability Phi(f_i). The latent and labels are redrawn (inputs kept)
/// until the class counts are balanced to within max(1, 0.05 n); more than
/// 1000 redraws raises NumericalError. If `latents` is non-null the accepted
/// latent draw is stored there.
Dataset gen_synthetic(std::size_t n, double sigma, double tau,
                      std::uint64_t seed, Eigen::VectorXd* latents = nullptr);

}  // namespace pmgp
