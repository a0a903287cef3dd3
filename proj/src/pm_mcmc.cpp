// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/pm_mcmc.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pmgp/errors.hpp"
#include "pmgp/laplace.hpp"
#include "pmgp/parallel.hpp"

namespace pmgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kEstimatorSalt = 0x7e57u;
constexpr std::size_t kWindow = 100;
constexpr std::size_t kMaxExtraWindows = 30;
constexpr std::size_t kMaxInitDraws = 100;

}  // namespace

ProposalSpec::ProposalSpec(std::vector<double> step_scales, bool adapted)
    : scales_(std::move(step_scales)), adapted_(adapted) {}

void ProposalSpec::set_step_scales(std::vector<double> scales) {
  if (adapted_)
    throw std::logic_error("proposal is frozen; step scales are immutable after warm-up");
  scales_ = std::move(scales);
}

ProposalSpec warmup_adapt(const Dataset& data, const PriorSpec& priors,
                          std::optional<Hyperparams> init_theta,
                          std::size_t n_iter, RngStream& rng) {
  data.validate();
  const Eigen::Index d = data.d();

  // Laplace marginal at theta; nullopt marks gram/Newton failure.
  auto la_marginal = [&](const Hyperparams& theta) -> std::optional<double> {
    try {
      GramMatrix G = gram(data.X, theta);
      LaplaceResult la = laplace_approx(data.y, G, /*with_covariance=*/false);
      if (!la.converged) return std::nullopt;
      return la.log_marginal_la;
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };

  Hyperparams theta;
  std::optional<double> log_marg;
  for (std::size_t attempt = 0; attempt < kMaxInitDraws; ++attempt) {
    theta = init_theta ? *init_theta : draw_from_hyperprior(priors, d, rng);
    log_marg = la_marginal(theta);
    if (log_marg) break;
    if (init_theta)
      throw NumericalError("warmup_adapt: Laplace failed at the supplied initial theta");
  }
  if (!log_marg)
    throw NumericalError("warmup_adapt: no valid hyperprior draw found");

  double log_prior = log_hyperprior(theta, priors);
  Eigen::VectorXd position = theta.as_vector();

  double global_scale = 0.5;
  std::size_t la_failures = 0;
  std::size_t window_accepts = 0;
  std::size_t iterations = 0;
  double window_acc = 0.0;
  bool in_band = false;

  const std::size_t max_iters = n_iter + kMaxExtraWindows * kWindow;
  while (iterations < max_iters) {
    ++iterations;
    Eigen::VectorXd proposal = position;
    for (Eigen::Index j = 0; j < proposal.size(); ++j)
      proposal[j] += global_scale * rng.normal();
    const Hyperparams theta_prop = Hyperparams::from_vector(proposal);

    bool accepted = false;
    const std::optional<double> marg_prop = la_marginal(theta_prop);
    if (!marg_prop) {
      ++la_failures;
    } else {
      const double prior_prop = log_hyperprior(theta_prop, priors);
      const double log_ratio = *marg_prop + prior_prop - *log_marg - log_prior;
      if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
        position = proposal;
        log_marg = marg_prop;
        log_prior = prior_prop;
        accepted = true;
      }
    }
    if (accepted) ++window_accepts;

    if (iterations % kWindow == 0) {
      window_acc = static_cast<double>(window_accepts) /
                   static_cast<double>(kWindow);
      window_accepts = 0;
      in_band = window_acc >= 0.20 && window_acc <= 0.30;
      if (iterations >= n_iter && in_band) break;
      global_scale *= std::exp(window_acc - 0.25);
    }
  }

  ProposalSpec spec(std::vector<double>(static_cast<std::size_t>(position.size()),
                                        global_scale),
                    /*adapted=*/true);
  spec.final_window_acceptance = window_acc;
  spec.warmup_iterations = iterations;
  spec.la_failures = la_failures;
  return spec;
}

namespace {

// Shared proposal-evaluation path for pm_step and make_initial_state.
std::optional<LogMarginalEstimate> evaluate_marginal(
    const Hyperparams& theta, const Dataset& data,
    const EstimatorConfig& config, RngStream& est_rng,
    const MarginalEstimator& override_fn, StepInfo* info) {
  GramMatrix G;
  try {
    G = gram(data.X, theta);
  } catch (const NumericalError&) {
    if (info) info->gram_failed = true;
    return std::nullopt;
  }

  LaplaceResult la;
  const bool needs_la = override_fn ? false : config.needs_laplace();
  if (needs_la) {
    try {
      la = laplace_approx(data.y, G, /*with_covariance=*/true);
    } catch (const NumericalError&) {
      if (info) info->la_failed = true;
      return std::nullopt;
    }
    if (!la.converged) {
      if (info) info->la_failed = true;
      return std::nullopt;
    }
  }

  LogMarginalEstimate est =
      override_fn ? override_fn(theta, G, needs_la ? &la : nullptr, est_rng)
                  : estimate_log_marginal(config, data.y, G,
                                          needs_la ? &la : nullptr, est_rng);
  if (est.log_value == -kInf) {
    if (info) info->estimate_minus_inf = true;
    return std::nullopt;
  }
  return est;
}

}  // namespace

ChainState make_initial_state(const Hyperparams& theta, const Dataset& data,
                              const PriorSpec& priors,
                              const EstimatorConfig& estimator_config,
                              RngStream& rng,
                              const MarginalEstimator& estimator_override) {
  RngStream est_rng = rng.substream(kEstimatorSalt);
  StepInfo info;
  auto est = evaluate_marginal(theta, data, estimator_config, est_rng,
                               estimator_override, &info);
  if (!est)
    throw NumericalError("make_initial_state: estimator failed at initial theta");
  ChainState state;
  state.theta = theta;
  state.log_estimate = est->log_value;
  state.log_hyperprior = log_hyperprior(theta, priors);
  state.method = estimator_config.method;
  state.iteration = 0;
  return state;
}

ChainState pm_step(const ChainState& state, const ProposalSpec& prop,
                   const EstimatorConfig& estimator_config,
                   const Dataset& data, const PriorSpec& priors,
                   RngStream& rng, StepInfo* info,
                   const MarginalEstimator& estimator_override) {
  if (!prop.adapted())
    throw std::invalid_argument("pm_step requires a frozen (adapted) proposal");

  const std::vector<double>& scales = prop.step_scales();
  Eigen::VectorXd position = state.theta.as_vector();
  if (static_cast<std::size_t>(position.size()) != scales.size())
    throw std::invalid_argument("proposal scale count does not match theta");

  for (Eigen::Index j = 0; j < position.size(); ++j)
    position[j] += scales[static_cast<std::size_t>(j)] * rng.normal();
  const Hyperparams theta_prop = Hyperparams::from_vector(position);

  ChainState next = state;
  next.iteration = state.iteration + 1;

  StepInfo local;
  RngStream est_rng = rng.substream(kEstimatorSalt);
  const auto est = evaluate_marginal(theta_prop, data, estimator_config,
                                     est_rng, estimator_override, &local);
  if (est) {
    const double prior_prop = log_hyperprior(theta_prop, priors);
    const double log_ratio =
        est->log_value + prior_prop - state.log_estimate - state.log_hyperprior;
    if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
      next.theta = theta_prop;
      next.log_estimate = est->log_value;  // retained until the next acceptance
      next.log_hyperprior = prior_prop;
      local.accepted = true;
    }
  }
  if (info) *info = local;
  return next;
}

std::vector<ChainRecord> run_chains(const Dataset& data,
                                    const ChainConfig& config,
                                    const MarginalEstimator& estimator_override) {
  data.validate();
  if (config.burnin >= config.n_iter)
    throw std::invalid_argument("burn-in must be smaller than n_iter");

  RngStream root(config.seed);
  RngStream warmup_rng = root.substream(0xADAF7u);
  const ProposalSpec prop = warmup_adapt(data, config.priors, std::nullopt,
                                         config.warmup_iters, warmup_rng);

  std::vector<ChainRecord> records(config.n_chains);
  parallel_for(config.n_chains, config.n_threads, [&](std::size_t c) {
    RngStream chain_rng = root.substream(c + 1);

    ChainState state;
    bool initialized = false;
    for (std::size_t attempt = 0; attempt < kMaxInitDraws && !initialized;
         ++attempt) {
      const Hyperparams theta0 = draw_from_hyperprior(
          config.priors, data.d(), chain_rng);
      try {
        RngStream init_rng = chain_rng.substream(0);
        state = make_initial_state(theta0, data, config.priors,
                                   config.estimator, init_rng,
                                   estimator_override);
        initialized = true;
      } catch (const NumericalError&) {
      }
    }
    if (!initialized)
      throw NumericalError("run_chains: no valid initial theta for chain");

    ChainRecord& rec = records[c];
    rec.chain_id = c;
    rec.burnin = config.burnin;
    rec.thetas.reserve(config.n_iter);
    rec.log_estimates.reserve(config.n_iter);
    rec.accept_flags.reserve(config.n_iter);

    std::size_t post_burnin_accepts = 0;
    for (std::size_t it = 1; it <= config.n_iter; ++it) {
      RngStream step_rng = chain_rng.substream(it);
      StepInfo step_info;
      state = pm_step(state, prop, config.estimator, data, config.priors,
                      step_rng, &step_info, estimator_override);
      rec.thetas.push_back(state.theta);
      rec.log_estimates.push_back(state.log_estimate);
      rec.accept_flags.push_back(step_info.accepted ? 1 : 0);
      if (it > config.burnin && step_info.accepted) ++post_burnin_accepts;
    }
    rec.acceptance_rate = static_cast<double>(post_burnin_accepts) /
                          static_cast<double>(config.n_iter - config.burnin);
  });
  return records;
}

double pooled_acceptance(std::span<const ChainRecord> records) {
  std::size_t accepts = 0;
  std::size_t total = 0;
  for (const ChainRecord& rec : records) {
    for (std::size_t it = rec.burnin; it < rec.accept_flags.size(); ++it) {
      accepts += rec.accept_flags[it];
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(accepts) / static_cast<double>(total);
}

void write_chains_csv(std::ostream& out, std::span<const ChainRecord> records,
                      std::span<const std::string> comment_lines) {
  for (const std::string& line : comment_lines) out << "# " << line << "\n";
  if (records.empty()) return;

  const std::size_t n_tau = records[0].thetas.empty()
                                ? 1
                                : records[0].thetas[0].log_lengthscales.size();
  out << "iteration,chain_id,log_sigma";
  for (std::size_t r = 1; r <= n_tau; ++r) out << ",log_tau_" << r;
  out << ",log_estimate,accepted\n";

  out << std::setprecision(17);
  for (const ChainRecord& rec : records) {
    for (std::size_t it = 0; it < rec.thetas.size(); ++it) {
      const Hyperparams& theta = rec.thetas[it];
      out << (it + 1) << ',' << rec.chain_id << ',' << theta.log_sigma;
      for (double v : theta.log_lengthscales) out << ',' << v;
      out << ',' << rec.log_estimates[it] << ','
          << static_cast<int>(rec.accept_flags[it]) << "\n";
    }
  }
}

std::vector<Hyperparams> read_chain_thetas(std::istream& in, std::size_t burnin,
                                           std::size_t thin) {
  if (thin == 0) thin = 1;
  std::vector<Hyperparams> thetas;
  std::string line;
  int log_sigma_col = -1;
  int first_tau_col = -1;
  int n_tau = 0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (log_sigma_col < 0) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "log_sigma") log_sigma_col = static_cast<int>(i);
        if (fields[i].rfind("log_tau_", 0) == 0) {
          if (first_tau_col < 0) first_tau_col = static_cast<int>(i);
          ++n_tau;
        }
      }
      if (log_sigma_col < 0 || first_tau_col < 0)
        throw std::invalid_argument("chain CSV missing log_sigma/log_tau columns");
      continue;
    }
    const std::size_t iteration = std::stoull(fields[0]);
    if (iteration <= burnin) continue;
    if (row++ % thin != 0) continue;
    Hyperparams theta;
    theta.log_sigma = std::stod(fields[static_cast<std::size_t>(log_sigma_col)]);
    theta.log_lengthscales.resize(static_cast<std::size_t>(n_tau));
    for (int r = 0; r < n_tau; ++r)
      theta.log_lengthscales[static_cast<std::size_t>(r)] =
          std::stod(fields[static_cast<std::size_t>(first_tau_col + r)]);
    thetas.push_back(std::move(theta));
  }
  return thetas;
}

}  // namespace pmgp
