// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pmgp/estimators.hpp"
#include "pmgp/model.hpp"

namespace pmgp {

/// Current chain position. log_estimate is the retained marginal-likelihood
/// estimate for theta: it is recycled for every Hastings ratio until a
/// proposal is accepted, never recomputed in place.
struct ChainState {
  Hyperparams theta;
  double log_estimate = 0.0;
  double log_hyperprior = 0.0;
  EstimatorMethod method = EstimatorMethod::kAISApprox;
  std::size_t iteration = 0;
};

/// Random-walk scales on log theta. Frozen after warm-up: step scales are
/// immutable once adapted() is true.
class ProposalSpec {
 public:
  ProposalSpec() = default;
  ProposalSpec(std::vector<double> step_scales, bool adapted);

  const std::vector<double>& step_scales() const { return scales_; }
  bool adapted() const { return adapted_; }

  /// Throws std::logic_error once the proposal has been frozen.
  void set_step_scales(std::vector<double> scales);
  void freeze() { adapted_ = true; }

  double final_window_acceptance = 0.0;
  std::size_t warmup_iterations = 0;
  std::size_t la_failures = 0;

 private:
  std::vector<double> scales_;
  bool adapted_ = false;
};

struct ChainRecord {
  std::size_t chain_id = 0;
  std::size_t burnin = 0;
  std::vector<Hyperparams> thetas;
  std::vector<double> log_estimates;
  std::vector<std::uint8_t> accept_flags;
  double acceptance_rate = 0.0;  // over the post-burn-in window
};

struct ChainConfig {
  std::size_t n_chains = 5;
  std::size_t n_iter = 2000;  // recorded iterations per chain, burn-in included
  std::size_t burnin = 500;
  std::size_t warmup_iters = 2000;
  EstimatorConfig estimator;
  PriorSpec priors;
  std::uint64_t seed = 0;
  int n_threads = 1;
};

struct StepInfo {
  bool accepted = false;
  bool gram_failed = false;
  bool la_failed = false;
  bool estimate_minus_inf = false;
};

/// Replacement estimator hook (diagnostics and exact-chain comparisons);
/// `la` is null when the configured method does not require it.
using MarginalEstimator = std::function<LogMarginalEstimate(
    const Hyperparams&, const GramMatrix&, const LaplaceResult* la,
    RngStream&)>;

/// Preliminary MH run with the Laplace approximate marginal in the Hastings
/// ratio. A single global step scale is adjusted every 100 iterations by
/// exp(acc - 0.25); after n_iter iterations the run extends in 100-iteration
/// windows (bounded) until the window acceptance lands in [0.20, 0.30], then
/// the proposal is frozen. Starts from init_theta if given, otherwise from a
/// hyperprior draw.
ProposalSpec warmup_adapt(const Dataset& data, const PriorSpec& priors,
                          std::optional<Hyperparams> init_theta,
                          std::size_t n_iter, RngStream& rng);

/// One pseudo-marginal MH step: symmetric Gaussian random walk on log theta,
/// fresh unbiased estimate at the proposal, acceptance ratio against the
/// retained estimate. Gram/Laplace failures and -inf estimates reject.
ChainState pm_step(const ChainState& state, const ProposalSpec& prop,
                   const EstimatorConfig& estimator_config,
                   const Dataset& data, const PriorSpec& priors,
                   RngStream& rng, StepInfo* info = nullptr,
                   const MarginalEstimator& estimator_override = nullptr);

/// Builds the initial state: theta's marginal estimated with the run's
/// estimator so the chain is pseudo-marginal from the first iteration.
ChainState make_initial_state(const Hyperparams& theta, const Dataset& data,
                              const PriorSpec& priors,
                              const EstimatorConfig& estimator_config,
                              RngStream& rng,
                              const MarginalEstimator& estimator_override = nullptr);

/// Warm-up once, then n_chains independent chains from distinct hyperprior
/// draws. Chains run in parallel; each (chain, iteration, trajectory) owns a
/// deterministic RNG stream derived from config.seed.
std::vector<ChainRecord> run_chains(const Dataset& data,
                                    const ChainConfig& config,
                                    const MarginalEstimator& estimator_override = nullptr);

double pooled_acceptance(std::span<const ChainRecord> records);

/// CSV: iteration, chain_id, log_sigma, log_tau_1.., log_estimate, accepted.
/// Comment lines (leading '#') are emitted first.
void write_chains_csv(std::ostream& out, std::span<const ChainRecord> records,
                      std::span<const std::string> comment_lines);

/// Reads theta samples back from a chain CSV (for prediction).
std::vector<Hyperparams> read_chain_thetas(std::istream& in,
                                           std::size_t burnin = 0,
                                           std::size_t thin = 1);

}  // namespace pmgp
