// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace pmgp {

/// splitmix64-style mixing of a seed with a salt. Used to derive seeds for
/// independent substreams from a root seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// A seeded random stream. Substreams are derived from the stream's seed,
/// not from its consumed state, so work items forked per (chain, iteration,
/// trajectory) produce the same draws regardless of execution order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  RngStream substream(std::uint64_t salt) const { return RngStream(mix_seed(seed_, salt)); }

  /// Uniform draw in the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  /// Gamma(shape, rate) draw.
  double gamma(double shape, double rate);
  Eigen::VectorXd normal_vector(Eigen::Index n);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace pmgp
