// Apache License, Version 2.0, refer to LICENSE.txt
//
// Acceptance suite. Each criterion prints one [PASS]/[FAIL]/[SKIP] line;
// the process exits 0 when every selected criterion passes, 1 on any
// failure, and 77 when the only outcome was a skip (missing optional data).
//
//   pmgp_acceptance --criterion N [--full] [--data-dir PATH] [--threads N]

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "pmgp/dataset_io.hpp"
#include "pmgp/estimators.hpp"
#include "pmgp/laplace.hpp"
#include "pmgp/parallel.hpp"
#include "pmgp/pm_mcmc.hpp"
#include "pmgp/quadrature.hpp"
#include "pmgp/slice.hpp"
#include "pmgp/studies.hpp"
#include "pmgp/synthetic.hpp"

#ifndef PMGP_DATA_DIR
#define PMGP_DATA_DIR "data"
#endif

namespace {

using namespace pmgp;

struct Context {
  std::string data_dir = PMGP_DATA_DIR;
  int threads = 2;
  bool full = false;
};

struct Outcome {
  enum Kind { kPass, kFail, kSkip } kind = kPass;
  std::string detail;
};

#define EXPECT(cond, what)                                     \
  do {                                                         \
    if (!(cond)) {                                             \
      std::ostringstream os_;                                  \
      os_ << what;                                             \
      return {Outcome::kFail, os_.str()};                      \
    }                                                          \
  } while (0)

Dataset two_point_toy() {
  Dataset data;
  data.X.resize(2, 2);
  data.X << -1.0, -1.0, 1.0, 1.0;
  data.y.resize(2);
  data.y << 1.0, 1.0;
  data.feature_means = Eigen::VectorXd::Zero(2);
  data.feature_sds = Eigen::VectorXd::Ones(2);
  return data;
}

Hyperparams two_point_theta() {
  Hyperparams theta;
  theta.log_sigma = std::log(15.0);
  theta.log_lengthscales = {-1.0};
  return theta;
}

bool file_exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

// --------------------------------------------------------------------------
// Criterion 1: unbiasedness of IS and AIS-approx against the quadrature
// oracle on the two-point toy. 1e4 estimates each, 1% relative tolerance.
Outcome criterion_1(const Context& ctx) {
  const Dataset data = two_point_toy();
  const GramMatrix G = gram(data.X, two_point_theta());
  const LaplaceResult la = laplace_approx(data.y, G);
  EXPECT(la.converged, "Laplace approximation did not converge");
  const double oracle = quadrature_marginal(data, G, 200);
  const TemperatureSchedule sched = geometric_schedule(2);

  const std::size_t reps = 10000;
  const std::uint64_t seed = 26;

  auto run = [&](bool use_ais) {
    RngStream rng(seed);
    std::vector<double> values(reps);
    parallel_for(reps, ctx.threads, [&](std::size_t r) {
      RngStream rr = rng.substream(r);
      const double lv =
          use_ais ? ais_estimate(data.y, G, AnnealStart::from_approx(la),
                                 sched, 1, 1, rr)
                        .log_value
                  : is_estimate(data.y, G, la, 1, rr).log_value;
      values[r] = std::exp(lv);
    });
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / reps;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (reps - 1.0) / reps);
    return std::pair<double, double>{mean, se};
  };

  const auto [is_mean, is_se] = run(false);
  const auto [ais_mean, ais_se] = run(true);

  std::ostringstream detail;
  detail << "oracle=" << oracle << " IS mean=" << is_mean << " (se " << is_se
         << ") AIS mean=" << ais_mean << " (se " << ais_se << ")";

  EXPECT(std::abs(is_mean - oracle) <= 0.01 * oracle,
         "IS mean off by more than 1%: " << detail.str());
  EXPECT(std::abs(ais_mean - oracle) <= 0.01 * oracle,
         "AIS mean off by more than 1%: " << detail.str());
  // Statistical consistency regardless of the pinned seed.
  EXPECT(std::abs(is_mean - oracle) <= 3.0 * is_se,
         "IS mean outside 3 se: " << detail.str());
  EXPECT(std::abs(ais_mean - oracle) <= 3.0 * ais_se,
         "AIS mean outside 3 se: " << detail.str());
  return {Outcome::kPass, detail.str()};
}

// --------------------------------------------------------------------------
// Criterion 2: KS comparison of posterior log tau samples between exact MH
// (quadrature marginal) and PM-MH with AIS-approx, N_imp = 1, on the toy.
Outcome criterion_2(const Context& ctx) {
  const Dataset data = two_point_toy();
  const PriorSpec priors = PriorSpec::isotropic(2);

  RngStream warm_rng(4711);
  const ProposalSpec prop =
      warmup_adapt(data, priors, std::nullopt, 2000, warm_rng);

  const std::size_t n_samples = 10000;
  const std::size_t thin = 40;
  const std::size_t burn = 2000;
  const std::size_t total = burn + n_samples * thin;

  // 100 nodes per axis: log-marginal error below 3e-3 across the region the
  // chain visits, two orders under the KS resolution, at ~0.8 ms per call.
  const MarginalEstimator exact = [&data](const Hyperparams&,
                                          const GramMatrix& G,
                                          const LaplaceResult*, RngStream&) {
    LogMarginalEstimate est;
    est.log_value = quadrature_log_marginal(data, G, 100);
    est.log_weights = {est.log_value};
    est.n_imp = 1;
    return est;
  };

  EstimatorConfig pm_config;
  pm_config.method = EstimatorMethod::kAISApprox;
  pm_config.n_imp = 1;

  // A 20-segment ladder with 3 slice steps per level keeps the estimator's
  // weight tail light on this deliberately skewed toy. The data-size default
  // (s = 2, one step) is also exact in distribution, but its occasional
  // 1e5-iteration sticks leave a 1e4-sample empirical CDF far from
  // stationarity, which would test chain length rather than correctness.
  const TemperatureSchedule pm_sched = geometric_schedule(400);
  const MarginalEstimator pm_est =
      [&data, &pm_sched](const Hyperparams&, const GramMatrix& G,
                         const LaplaceResult* la, RngStream& rng) {
        return ais_estimate(data.y, G, AnnealStart::from_approx(*la), pm_sched,
                            1, 3, rng);
      };

  auto run_chain = [&](bool use_exact,
                       std::uint64_t seed) -> std::vector<double> {
    Hyperparams theta0;
    theta0.log_sigma = std::log(10.0);
    theta0.log_lengthscales = {std::log(0.5)};
    RngStream root(seed);
    RngStream init_rng = root.substream(0);
    ChainState state = make_initial_state(
        theta0, data, priors, pm_config, init_rng,
        use_exact ? exact : pm_est);
    std::vector<double> samples;
    samples.reserve(n_samples);
    for (std::size_t it = 1; it <= total; ++it) {
      RngStream step_rng = root.substream(it);
      state = pm_step(state, prop, pm_config, data, priors, step_rng, nullptr,
                      use_exact ? exact : pm_est);
      if (it > burn && (it - burn) % thin == 0)
        samples.push_back(state.theta.log_lengthscales[0]);
    }
    return samples;
  };

  std::vector<double> exact_samples, pm_samples;
  parallel_for(2, ctx.threads, [&](std::size_t which) {
    if (which == 0)
      exact_samples = run_chain(true, 1001);
    else
      pm_samples = run_chain(false, 2002);
  });

  const double ks = oracles::ks_statistic(exact_samples, pm_samples);
  const double crit = oracles::ks_critical(0.01, n_samples, n_samples);
  std::ostringstream detail;
  detail << "KS=" << ks << " critical(1%)=" << crit;
  EXPECT(ks < crit, detail.str());
  return {Outcome::kPass, detail.str()};
}

// --------------------------------------------------------------------------
// Criterion 3: variance-study trends on synthetic data, N_imp = 4,
// n in {50, 100, 500}.
Outcome criterion_3(const Context& ctx) {
  RStudyOptions options;
  options.n_list = {50, 100, 500};
  options.n_imp = 4;
  options.n_threads = ctx.threads;

  const std::vector<RStudyResult> results = r_study(options, 31415);

  auto median_for = [&](std::size_t n, EstimatorMethod m) -> double {
    for (const RStudyResult& res : results)
      if (res.n == n && res.method == m) return res.median;
    return -1.0;
  };

  std::ostringstream detail;
  for (std::size_t n : options.n_list)
    detail << "n=" << n << ": IS " << median_for(n, EstimatorMethod::kIS)
           << " AISp " << median_for(n, EstimatorMethod::kAISPrior) << " AISa "
           << median_for(n, EstimatorMethod::kAISApprox) << "; ";

  // Evaluate every clause so a failure reports the full picture.
  std::vector<std::string> violations;
  for (std::size_t n : {100u, 500u})
    if (!(median_for(n, EstimatorMethod::kAISApprox) <
          median_for(n, EstimatorMethod::kIS)))
      violations.push_back("AIS-approx not below IS at n=" +
                           std::to_string(n));
  if (!(median_for(50, EstimatorMethod::kIS) <
        median_for(100, EstimatorMethod::kIS)))
    violations.push_back("IS median not increasing 50->100");
  if (!(median_for(100, EstimatorMethod::kIS) <
        median_for(500, EstimatorMethod::kIS)))
    violations.push_back("IS median not increasing 100->500");
  for (std::size_t n : options.n_list)
    if (!(median_for(n, EstimatorMethod::kAISPrior) >
          median_for(n, EstimatorMethod::kAISApprox)))
      violations.push_back("AIS-prior not above AIS-approx at n=" +
                           std::to_string(n));

  if (!violations.empty()) {
    std::ostringstream msg;
    for (std::size_t i = 0; i < violations.size(); ++i)
      msg << (i ? "; " : "") << violations[i];
    msg << " | " << detail.str();
    return {Outcome::kFail, msg.str()};
  }
  return {Outcome::kPass, detail.str()};
}

// --------------------------------------------------------------------------
// Criterion 4: acceptance-rate spot checks on Pima. The fast variant runs a
// seeded n=200 subset and asserts only the AIS >= IS ordering; the full
// variant checks the reference bands (paper values +- 3 sd).
Outcome criterion_4(const Context& ctx) {
  const std::string pima_path = ctx.data_dir + "/pima.csv";
  if (!file_exists(pima_path))
    return {Outcome::kSkip,
            "dataset not bundled: " + pima_path +
                " (run scripts/fetch_uci.py, offline sandboxes cannot)"};

  LoadSpec spec;
  spec.label_column = "label";
  spec.positive_labels = {"1"};
  Dataset pima = load_dataset(pima_path, spec);

  ChainConfig base;
  base.n_chains = 5;
  base.n_iter = 2000;
  base.burnin = 500;
  base.warmup_iters = 2000;
  base.n_threads = ctx.threads;

  Dataset subset = pima;
  if (!ctx.full) {
    // Seeded n=200 subset.
    const std::size_t keep = 200;
    RngStream rng(606);
    std::vector<Eigen::Index> index(static_cast<std::size_t>(pima.n()));
    std::iota(index.begin(), index.end(), 0);
    std::shuffle(index.begin(), index.end(), rng.engine());
    subset.X.resize(static_cast<Eigen::Index>(keep), pima.d());
    subset.y.resize(static_cast<Eigen::Index>(keep));
    for (std::size_t i = 0; i < keep; ++i) {
      subset.X.row(static_cast<Eigen::Index>(i)) = pima.X.row(index[i]);
      subset.y[static_cast<Eigen::Index>(i)] = pima.y[index[i]];
    }
  }

  const BenchmarkRow is_row = acceptance_benchmark(
      subset, "pima", false, EstimatorMethod::kIS, 1, 1818, base);
  const BenchmarkRow ais_row = acceptance_benchmark(
      subset, "pima", false, EstimatorMethod::kAISApprox, 1, 1818, base);

  std::ostringstream detail;
  detail << "IS " << is_row.mean_acceptance << "% (" << is_row.sd_acceptance
         << ") AIS " << ais_row.mean_acceptance << "% ("
         << ais_row.sd_acceptance << ")";

  EXPECT(ais_row.mean_acceptance >= is_row.mean_acceptance,
         "AIS acceptance below IS: " << detail.str());
  if (ctx.full) {
    EXPECT(std::abs(is_row.mean_acceptance - 24.8) <= 3.0 * 1.4,
           "IS outside 24.8 +- 4.2: " << detail.str());
    EXPECT(std::abs(ais_row.mean_acceptance - 29.3) <= 3.0 * 2.6,
           "AIS outside 29.3 +- 7.8: " << detail.str());
  }
  return {Outcome::kPass, detail.str()};
}

// --------------------------------------------------------------------------
// Criterion 5: warm-up terminates with window acceptance in [20%, 30%] on
// every bundled dataset.
Outcome criterion_5(const Context& ctx) {
  const std::vector<std::string> bundled = {"toy_two_point.csv", "synth_n50.csv",
                                            "synth_n200.csv"};
  std::ostringstream detail;
  for (const std::string& name : bundled) {
    const std::string path = ctx.data_dir + "/" + name;
    EXPECT(file_exists(path), "missing bundled dataset " << path);
    LoadSpec spec;
    spec.normalize = false;  // fixtures are stored in model coordinates
    const Dataset data = load_dataset(path, spec);
    RngStream rng(31337);
    const ProposalSpec prop =
        warmup_adapt(data, PriorSpec::isotropic(data.d()), std::nullopt, 2000,
                     rng);
    detail << name << " acc=" << prop.final_window_acceptance << "; ";
    EXPECT(prop.final_window_acceptance >= 0.20 &&
               prop.final_window_acceptance <= 0.30,
           name << " window acceptance " << prop.final_window_acceptance
                << " outside [0.20, 0.30]");
  }
  return {Outcome::kPass, detail.str()};
}

// --------------------------------------------------------------------------
// Criterion 6: slice-sampler stationarity on the toy: beta = 0 preserves the
// reference moments; the approximation-annealed target at beta = 1 matches
// the quadrature posterior.
Outcome criterion_6(const Context&) {
  const Dataset data = two_point_toy();
  const GramMatrix G = gram(data.X, two_point_theta());
  const std::size_t steps = 100000;

  {  // beta = 0: reference = prior.
    const GaussianRef prior = GaussianRef::prior(G);
    TemperedTarget target{&prior, [](const Eigen::VectorXd&) { return 0.0; },
                          0.0};
    RngStream rng(808);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(2, 2);
    for (std::size_t t = 0; t < steps; ++t) {
      f = ess_step(f, target, rng);
      mean += f;
      second += f * f.transpose();
    }
    mean /= static_cast<double>(steps);
    const Eigen::MatrixXd cov =
        second / static_cast<double>(steps) - mean * mean.transpose();
    for (int i = 0; i < 2; ++i) {
      const double var = G.K(i, i) + G.jitter;
      // Successive states are uncorrelated at beta = 0.
      const double se_mean = std::sqrt(var / static_cast<double>(steps));
      const double se_var = var * std::sqrt(2.0 / static_cast<double>(steps));
      EXPECT(std::abs(mean[i]) <= 3.0 * se_mean,
             "beta=0 mean[" << i << "]=" << mean[i] << " se=" << se_mean);
      EXPECT(std::abs(cov(i, i) - var) <= 3.0 * se_var,
             "beta=0 var[" << i << "]=" << cov(i, i) << " expected " << var);
    }
  }

  {  // beta = 1 approximation-annealed: invariant density is the posterior.
    const LaplaceResult la = laplace_approx(data.y, G);
    EXPECT(la.converged, "Laplace approximation did not converge");
    const GaussianRef& q = la.q;
    TemperedTarget target{&q,
                          [&](const Eigen::VectorXd& f) {
                            return log_gp_prior(f, G) +
                                   log_likelihood(f, data.y) - q.log_pdf(f);
                          },
                          1.0};
    const PosteriorMoments ref = quadrature_posterior_moments(data, G, 220);

    RngStream rng(909);
    Eigen::VectorXd f = la.f_hat;
    std::vector<double> trace0, trace1, sq0, sq1;
    trace0.reserve(steps);
    trace1.reserve(steps);
    sq0.reserve(steps);
    sq1.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      f = ess_step(f, target, rng);
      trace0.push_back(f[0]);
      trace1.push_back(f[1]);
      sq0.push_back(f[0] * f[0]);
      sq1.push_back(f[1] * f[1]);
    }
    auto mean_of = [](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) /
             static_cast<double>(v.size());
    };
    const double ref_sq0 = ref.cov(0, 0) + ref.mean[0] * ref.mean[0];
    const double ref_sq1 = ref.cov(1, 1) + ref.mean[1] * ref.mean[1];
    EXPECT(std::abs(mean_of(trace0) - ref.mean[0]) <=
               3.0 * oracles::batch_means_se(trace0),
           "beta=1 mean[0]=" << mean_of(trace0) << " ref=" << ref.mean[0]);
    EXPECT(std::abs(mean_of(trace1) - ref.mean[1]) <=
               3.0 * oracles::batch_means_se(trace1),
           "beta=1 mean[1]=" << mean_of(trace1) << " ref=" << ref.mean[1]);
    EXPECT(std::abs(mean_of(sq0) - ref_sq0) <=
               3.0 * oracles::batch_means_se(sq0),
           "beta=1 E[f0^2]=" << mean_of(sq0) << " ref=" << ref_sq0);
    EXPECT(std::abs(mean_of(sq1) - ref_sq1) <=
               3.0 * oracles::batch_means_se(sq1),
           "beta=1 E[f1^2]=" << mean_of(sq1) << " ref=" << ref_sq1);
  }
  return {Outcome::kPass, ""};
}

// --------------------------------------------------------------------------
// Criterion 7: fast property bundle.
Outcome criterion_7(const Context&) {
  // logsumexp identities.
  EXPECT(std::abs(logsumexp(std::vector<double>{0.0, 0.0}) - std::log(2.0)) <
             1e-14,
         "logsumexp([0,0])");
  EXPECT(std::abs(logsumexp(std::vector<double>{-1000.0, -1000.0}) -
                  (-1000.0 + std::log(2.0))) < 1e-12,
         "logsumexp shift");
  EXPECT(logsumexp(std::vector<double>{
             0.0, -std::numeric_limits<double>::infinity()}) == 0.0,
         "logsumexp with -inf");

  // Schedule invariants.
  for (std::size_t n : {1u, 2u, 7u, 10u, 50u, 100u, 214u, 682u, 1372u}) {
    const TemperatureSchedule sched = geometric_schedule(n);
    const std::size_t s = sched.segments();
    EXPECT(sched.betas.front() == 1.0 && sched.betas.back() == 0.0,
           "schedule endpoints at n=" << n);
    EXPECT(sched.betas.size() == s + 1, "schedule length at n=" << n);
    EXPECT(s % 2 == 0, "segment count must be even at n=" << n);
    for (std::size_t i = 1; i < sched.betas.size(); ++i)
      EXPECT(sched.betas[i] < sched.betas[i - 1],
             "schedule not strictly decreasing at n=" << n);
  }

  // AIS with frozen transitions is exactly IS.
  const Dataset data = two_point_toy();
  const GramMatrix G = gram(data.X, two_point_theta());
  const LaplaceResult la = laplace_approx(data.y, G);
  EXPECT(la.converged, "Laplace approximation did not converge");
  {
    RngStream rng_a(42), rng_b(42);
    const LogMarginalEstimate frozen =
        ais_estimate(data.y, G, AnnealStart::from_approx(la),
                     geometric_schedule(100), 16, 0, rng_a);
    const LogMarginalEstimate is = is_estimate(data.y, G, la, 16, rng_b);
    for (std::size_t t = 0; t < 16; ++t)
      EXPECT(frozen.log_weights[t] == is.log_weights[t],
             "frozen AIS weight " << t << " differs from IS");
  }

  // Estimate recycling in a short real chain.
  {
    const Dataset synth = gen_synthetic(10, 20.0, 0.255, 4242);
    ChainConfig config;
    config.n_chains = 1;
    config.n_iter = 200;
    config.burnin = 50;
    config.warmup_iters = 300;
    config.estimator.method = EstimatorMethod::kAISApprox;
    config.priors = PriorSpec::isotropic(2);
    config.seed = 17;
    const std::vector<ChainRecord> records = run_chains(synth, config);
    for (std::size_t it = 1; it < records[0].log_estimates.size(); ++it)
      if (!records[0].accept_flags[it])
        EXPECT(records[0].log_estimates[it] == records[0].log_estimates[it - 1],
               "retained estimate changed on a rejection at " << it);
  }

  // Laplace gradient at the mode and finite-difference curvature.
  {
    Eigen::MatrixXd X(3, 2);
    X << 0.1, 0.2, 0.8, 0.4, 0.5, 0.9;
    Hyperparams theta;
    theta.log_sigma = std::log(4.0);
    theta.log_lengthscales = {std::log(0.6)};
    const GramMatrix G3 = gram(X, theta);
    Eigen::VectorXd y(3);
    y << 1.0, -1.0, 1.0;
    const LaplaceResult la3 = laplace_approx(y, G3);
    EXPECT(la3.converged, "Laplace not converged on n=3 instance");

    Eigen::VectorXd grad(3);
    for (Eigen::Index i = 0; i < 3; ++i) {
      const double z = y[i] * la3.f_hat[i];
      grad[i] = y[i] * norm_pdf_over_cdf(z);
    }
    grad -= G3.solve(la3.f_hat);
    EXPECT(grad.lpNorm<Eigen::Infinity>() <
               1e-6 * std::max(1.0, la3.f_hat.lpNorm<Eigen::Infinity>()),
           "gradient at mode " << grad.lpNorm<Eigen::Infinity>());

    const Eigen::MatrixXd H = oracles::fd_hessian(
        [&](const Eigen::VectorXd& f) {
          return log_unnorm_posterior_f(f, y, G3);
        },
        la3.f_hat, 1e-4);
    const Eigen::MatrixXd sigma_fd = (-H).inverse();
    const Eigen::MatrixXd sigma = la3.q.cov_chol * la3.q.cov_chol.transpose();
    EXPECT((sigma - sigma_fd).norm() <= 1e-4 * sigma_fd.norm(),
           "curvature mismatch " << (sigma - sigma_fd).norm());
  }
  return {Outcome::kPass, ""};
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.threads = hardware_threads();
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      selected.push_back(std::atoi(argv[++i]));
    else if (std::strcmp(argv[i], "--full") == 0)
      ctx.full = true;
    else if (std::strcmp(argv[i], "--data-dir") == 0 && i + 1 < argc)
      ctx.data_dir = argv[++i];
    else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
      ctx.threads = std::atoi(argv[++i]);
    else {
      std::cerr << "usage: pmgp_acceptance [--criterion N]... [--full] "
                   "[--data-dir PATH] [--threads N]\n";
      return 2;
    }
  }
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7};

  struct Entry {
    int id;
    const char* name;
    Outcome (*run)(const Context&);
  };
  const Entry entries[] = {
      {1, "unbiasedness of IS and AIS-approx vs quadrature oracle", criterion_1},
      {2, "pseudo-marginal exactness (KS vs exact MH) on n=2", criterion_2},
      {3, "variance-study trends on synthetic data", criterion_3},
      {4, "acceptance-rate spot checks on Pima", criterion_4},
      {5, "warm-up acceptance band on bundled datasets", criterion_5},
      {6, "slice-sampler stationarity", criterion_6},
      {7, "property bundle", criterion_7},
  };

  bool any_fail = false;
  bool any_pass = false;
  bool any_skip = false;
  for (int id : selected) {
    const Entry* entry = nullptr;
    for (const Entry& e : entries)
      if (e.id == id) entry = &e;
    if (!entry) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    Outcome outcome;
    try {
      outcome = entry->run(ctx);
    } catch (const std::exception& e) {
      outcome = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = outcome.kind == Outcome::kPass   ? "[PASS]"
                      : outcome.kind == Outcome::kFail ? "[FAIL]"
                                                       : "[SKIP]";
    std::cout << tag << " criterion " << entry->id << ": " << entry->name;
    if (!outcome.detail.empty()) std::cout << " -- " << outcome.detail;
    std::cout << std::endl;
    any_fail |= outcome.kind == Outcome::kFail;
    any_pass |= outcome.kind == Outcome::kPass;
    any_skip |= outcome.kind == Outcome::kSkip;
  }
  if (any_fail) return 1;
  if (any_skip && !any_pass) return 77;
  return 0;
}
