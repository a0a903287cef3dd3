// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pmgp/model.hpp"
#include "pmgp/parallel.hpp"
#include "pmgp/slice.hpp"

namespace pmgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The IS log weight; also the beta=1 residual for approximation annealing.
// Shared so that AIS with frozen transitions reproduces IS bit for bit.
double is_log_weight(const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                     const GramMatrix& G, const GaussianRef& q) {
  return log_likelihood(f, y) + log_gp_prior(f, G) - q.log_pdf(f);
}

}  // namespace

std::string to_string(EstimatorMethod m) {
  switch (m) {
    case EstimatorMethod::kIS: return "is";
    case EstimatorMethod::kAISPrior: return "ais-prior";
    case EstimatorMethod::kAISApprox: return "ais-approx";
  }
  return "?";
}

EstimatorMethod estimator_method_from_string(const std::string& name) {
  if (name == "is") return EstimatorMethod::kIS;
  if (name == "ais-prior") return EstimatorMethod::kAISPrior;
  if (name == "ais-approx") return EstimatorMethod::kAISApprox;
  throw std::invalid_argument("unknown estimator method: " + name);
}

void TemperatureSchedule::validate() const {
  if (betas.size() < 2)
    throw std::invalid_argument("schedule needs at least two temperatures");
  if (betas.front() != 1.0 || betas.back() != 0.0)
    throw std::invalid_argument("schedule must start at 1 and end at 0");
  for (std::size_t i = 1; i < betas.size(); ++i)
    if (!(betas[i] < betas[i - 1]))
      throw std::invalid_argument("schedule must be strictly decreasing");
}

TemperatureSchedule geometric_schedule(std::size_t n) {
  if (n < 1) throw std::invalid_argument("geometric_schedule: n must be >= 1");
  std::size_t s = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n))));
  if (s % 2 != 0) ++s;
  const std::size_t half = s / 2;

  const double log_hi = std::log(0.2);
  const double log_lo = std::log(1e-6);

  TemperatureSchedule sched;
  sched.betas.reserve(s + 1);
  // 1 down to 0.2 inclusive (just {1} when the block has a single slot).
  for (std::size_t j = 0; j < half; ++j) {
    const double t = half == 1 ? 0.0
                               : static_cast<double>(j) /
                                     static_cast<double>(half - 1);
    sched.betas.push_back(std::exp(t * log_hi));
  }
  // 0.2 exclusive down to 1e-6 inclusive.
  for (std::size_t j = 1; j <= half; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(half);
    sched.betas.push_back(std::exp(log_hi + t * (log_lo - log_hi)));
  }
  sched.betas.push_back(0.0);
  sched.betas.front() = 1.0;
  return sched;
}

double logsumexp(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("logsumexp: empty input");
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -kInf) return -kInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

namespace {

LogMarginalEstimate finalize(std::vector<double> log_weights,
                             EstimatorMethod method, std::uint64_t stalls) {
  LogMarginalEstimate est;
  est.n_imp = log_weights.size();
  est.log_value = logsumexp(log_weights) -
                  std::log(static_cast<double>(log_weights.size()));
  est.log_weights = std::move(log_weights);
  est.method = method;
  est.ess_stalls = stalls;
  return est;
}

}  // namespace

LogMarginalEstimate is_estimate(const Eigen::VectorXd& y, const GramMatrix& G,
                                const LaplaceResult& la, std::size_t n_imp,
                                RngStream& rng, int n_threads) {
  if (n_imp < 1) throw std::invalid_argument("is_estimate: n_imp must be >= 1");
  if (!la.converged)
    throw std::invalid_argument("is_estimate: Laplace approximation did not converge");

  std::vector<double> log_weights(n_imp);
  parallel_for(n_imp, n_threads, [&](std::size_t t) {
    RngStream traj_rng = rng.substream(t);
    const Eigen::VectorXd f = la.q.sample(traj_rng);
    log_weights[t] = is_log_weight(f, y, G, la.q);
  });
  return finalize(std::move(log_weights), EstimatorMethod::kIS, 0);
}

LogMarginalEstimate ais_estimate(const Eigen::VectorXd& y, const GramMatrix& G,
                                 AnnealStart start,
                                 const TemperatureSchedule& schedule,
                                 std::size_t n_imp,
                                 std::size_t ess_steps_per_level,
                                 RngStream& rng, int n_threads) {
  if (n_imp < 1) throw std::invalid_argument("ais_estimate: n_imp must be >= 1");
  schedule.validate();
  if (start.la && !start.la->converged)
    throw std::invalid_argument("ais_estimate: Laplace approximation did not converge");

  const bool from_prior = start.la == nullptr;
  GaussianRef prior_ref;
  if (from_prior) prior_ref = GaussianRef::prior(G);
  const GaussianRef& reference = from_prior ? prior_ref : start.la->q;

  // Delta(f) = log g_0(f) - log g_s(f), the beta=1 residual.
  std::function<double(const Eigen::VectorXd&)> delta;
  if (from_prior) {
    delta = [&y](const Eigen::VectorXd& f) { return log_likelihood(f, y); };
  } else {
    delta = [&y, &G, &reference](const Eigen::VectorXd& f) {
      return is_log_weight(f, y, G, reference);
    };
  }

  const std::vector<double>& betas = schedule.betas;
  const std::size_t s = schedule.segments();

  std::vector<double> log_weights(n_imp);
  std::vector<std::uint64_t> stalls(n_imp, 0);

  parallel_for(n_imp, n_threads, [&](std::size_t t) {
    RngStream traj_rng = rng.substream(t);
    EssStats stats;

    Eigen::VectorXd f = reference.sample(traj_rng);
    double residual = delta(f);  // Delta(f_{s-1})
    double residual_prev = residual;

    // Telescoped log weight: Delta(f_0) + sum_i beta_i (Delta(f_i) - Delta(f_{i-1})).
    // With frozen transitions every difference is exactly zero, leaving the
    // plain IS weight.
    double logw = 0.0;
    TemperedTarget target{&reference, delta, 1.0};
    for (std::size_t i = s - 1; i >= 1; --i) {
      target.beta = betas[i];
      for (std::size_t k = 0; k < ess_steps_per_level; ++k)
        f = ess_step_cached(f, residual, target, traj_rng, &stats);
      logw += betas[i] * (residual_prev - residual);
      residual_prev = residual;
    }
    logw += residual;  // Delta(f_0)

    log_weights[t] = logw;
    stalls[t] = stats.stalls;
  });

  std::uint64_t total_stalls = 0;
  for (auto v : stalls) total_stalls += v;
  return finalize(std::move(log_weights),
                  from_prior ? EstimatorMethod::kAISPrior
                             : EstimatorMethod::kAISApprox,
                  total_stalls);
}

LogMarginalEstimate estimate_log_marginal(const EstimatorConfig& config,
                                          const Eigen::VectorXd& y,
                                          const GramMatrix& G,
                                          const LaplaceResult* la,
                                          RngStream& rng) {
  switch (config.method) {
    case EstimatorMethod::kIS:
      if (!la) throw std::invalid_argument("IS estimator needs a Laplace result");
      return is_estimate(y, G, *la, config.n_imp, rng, config.n_threads);
    case EstimatorMethod::kAISPrior:
      return ais_estimate(y, G, AnnealStart::from_prior(),
                          geometric_schedule(static_cast<std::size_t>(y.size())),
                          config.n_imp, config.ess_steps_per_level, rng,
                          config.n_threads);
    case EstimatorMethod::kAISApprox:
      if (!la) throw std::invalid_argument("AIS-approx estimator needs a Laplace result");
      return ais_estimate(y, G, AnnealStart::from_approx(*la),
                          geometric_schedule(static_cast<std::size_t>(y.size())),
                          config.n_imp, config.ess_steps_per_level, rng,
                          config.n_threads);
  }
  throw std::invalid_argument("unknown estimator method");
}

}  // namespace pmgp
