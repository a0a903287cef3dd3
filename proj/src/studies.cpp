// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/studies.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "pmgp/errors.hpp"
#include "pmgp/laplace.hpp"
#include "pmgp/parallel.hpp"
#include "pmgp/synthetic.hpp"

namespace pmgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog10 = 2.3025850929940457;

double sample_sd(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

double r_statistic_with(const Dataset& data, const Hyperparams& theta,
                        std::size_t reps, RngStream& rng,
                        const MarginalEstimator& estimator,
                        bool needs_laplace) {
  if (reps < 2) throw std::invalid_argument("r_statistic: reps must be >= 2");
  data.validate();

  const GramMatrix G = gram(data.X, theta);
  LaplaceResult la;
  if (needs_laplace) {
    la = laplace_approx(data.y, G, /*with_covariance=*/true);
    if (!la.converged)
      throw NumericalError("r_statistic: Laplace did not converge at theta");
  }

  std::vector<double> log10_estimates(reps);
  bool degenerate = false;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    RngStream rep_rng = rng.substream(rep);
    const LogMarginalEstimate est =
        estimator(theta, G, needs_laplace ? &la : nullptr, rep_rng);
    if (est.log_value == -kInf) {
      degenerate = true;
      break;
    }
    log10_estimates[rep] = est.log_value / kLog10;
  }
  if (degenerate) return kInf;
  return sample_sd(log10_estimates);
}

double r_statistic(const Dataset& data, const Hyperparams& theta,
                   const EstimatorConfig& config, std::size_t reps,
                   RngStream& rng) {
  MarginalEstimator estimator = [&config, &data](const Hyperparams&,
                                                 const GramMatrix& G,
                                                 const LaplaceResult* la,
                                                 RngStream& est_rng) {
    return estimate_log_marginal(config, data.y, G, la, est_rng);
  };
  return r_statistic_with(data, theta, reps, rng, estimator,
                          config.needs_laplace());
}

std::vector<RStudyResult> r_study(const RStudyOptions& options,
                                  std::uint64_t seed) {
  std::vector<RStudyResult> results;
  RngStream root(seed);

  for (std::size_t n : options.n_list) {
    const Dataset data =
        gen_synthetic(n, options.sigma, options.tau, mix_seed(seed, n));

    // Posterior theta draws from a preliminary AIS-approx chain, thinned to
    // n_theta_draws.
    ChainConfig prelim;
    prelim.n_chains = 1;
    prelim.n_iter = options.prelim_iters;
    prelim.burnin = options.prelim_burnin;
    prelim.warmup_iters = options.prelim_warmup;
    prelim.estimator.method = EstimatorMethod::kAISApprox;
    prelim.estimator.n_imp = options.n_imp;
    // Single chain: the estimator can own the thread budget.
    prelim.estimator.n_threads = options.n_threads;
    prelim.priors = PriorSpec::isotropic(data.d());
    prelim.seed = mix_seed(seed, n ^ 0xC0FFEEu);
    prelim.n_threads = 1;
    const std::vector<ChainRecord> prelim_records = run_chains(data, prelim);

    const std::vector<Hyperparams>& chain = prelim_records[0].thetas;
    const std::size_t kept = chain.size() - prelim.burnin;
    if (kept < options.n_theta_draws)
      throw std::invalid_argument("preliminary chain too short for theta draws");
    std::vector<Hyperparams> thetas(options.n_theta_draws);
    for (std::size_t k = 0; k < options.n_theta_draws; ++k) {
      const std::size_t offset = (k * kept) / options.n_theta_draws;
      thetas[k] = chain[prelim.burnin + offset];
    }

    for (EstimatorMethod method : options.methods) {
      RStudyResult res;
      res.n = n;
      res.method = method;
      res.r_values.resize(thetas.size());

      EstimatorConfig config;
      config.method = method;
      config.n_imp = options.n_imp;

      RngStream study_rng = root.substream(mix_seed(n, static_cast<int>(method)));
      parallel_for(thetas.size(), options.n_threads, [&](std::size_t k) {
        RngStream theta_rng = study_rng.substream(k);
        res.r_values[k] =
            r_statistic(data, thetas[k], config, options.reps, theta_rng);
      });

      std::vector<double> sorted = res.r_values;
      std::sort(sorted.begin(), sorted.end());
      res.median = median_of(sorted);
      res.q25 = sorted[sorted.size() / 4];
      res.q75 = sorted[(3 * sorted.size()) / 4];
      results.push_back(std::move(res));
    }
  }
  return results;
}

void write_rstudy_csv(std::ostream& out, std::span<const RStudyResult> results,
                      std::span<const std::string> comment_lines) {
  for (const std::string& c : comment_lines) out << "# " << c << "\n";
  out << "method,n,theta_index,r\n";
  out << std::setprecision(17);
  for (const RStudyResult& res : results)
    for (std::size_t k = 0; k < res.r_values.size(); ++k)
      out << to_string(res.method) << ',' << res.n << ',' << k << ','
          << res.r_values[k] << "\n";
}

BenchmarkRow acceptance_benchmark(const Dataset& data,
                                  const std::string& dataset_name, bool ard,
                                  EstimatorMethod method, std::size_t n_imp,
                                  std::uint64_t seed,
                                  const ChainConfig& base_config) {
  ChainConfig config = base_config;
  config.priors = ard ? PriorSpec::ard_covariance(data.d())
                      : PriorSpec::isotropic(data.d());
  config.estimator.method = method;
  config.estimator.n_imp = n_imp;
  config.seed = seed;

  const std::vector<ChainRecord> records = run_chains(data, config);

  BenchmarkRow row;
  row.dataset = dataset_name;
  row.covariance = ard ? "ard" : "iso";
  row.method = method;
  row.n_imp = n_imp;
  for (const ChainRecord& rec : records)
    row.per_chain.push_back(100.0 * rec.acceptance_rate);
  double mean = 0.0;
  for (double a : row.per_chain) mean += a;
  mean /= static_cast<double>(row.per_chain.size());
  row.mean_acceptance = mean;
  row.sd_acceptance = row.per_chain.size() > 1 ? sample_sd(row.per_chain) : 0.0;
  return row;
}

void write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRow> rows,
                         std::span<const std::string> comment_lines) {
  for (const std::string& c : comment_lines) out << "# " << c << "\n";
  out << "dataset,covariance,method,n_imp,mean_acceptance_pct,sd_acceptance_pct\n";
  for (const BenchmarkRow& row : rows)
    out << row.dataset << ',' << row.covariance << ',' << to_string(row.method)
        << ',' << row.n_imp << ',' << std::fixed << std::setprecision(1)
        << row.mean_acceptance << ',' << row.sd_acceptance << "\n";
}

}  // namespace pmgp
