// Apache License, Version 2.0, refer to LICENSE.txt
//
// pmgp: pseudo-marginal MCMC for Gaussian process classification.
// Subcommands cover dataset generation, marginal-likelihood estimation,
// chain fitting, prediction, and the variance / acceptance-rate studies.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmgp/dataset_io.hpp"
#include "pmgp/errors.hpp"
#include "pmgp/estimators.hpp"
#include "pmgp/laplace.hpp"
#include "pmgp/parallel.hpp"
#include "pmgp/pm_mcmc.hpp"
#include "pmgp/predict.hpp"
#include "pmgp/quadrature.hpp"
#include "pmgp/studies.hpp"
#include "pmgp/synthetic.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitArgument = 2;
constexpr int kExitNumerical = 3;

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json cfg = json::parse(in, nullptr, /*allow_exceptions=*/true);
  if (!cfg.is_object())
    throw std::invalid_argument("config file must hold a flat JSON object");
  return cfg;
}

// Flags win over the config file, which wins over defaults.
template <typename T>
void fallback(const CLI::Option* opt, const json& cfg, const char* key,
              T& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  return parts;
}

// "sigma,tau1[,tau2...]" on the natural scale.
pmgp::Hyperparams parse_theta(const std::string& text) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() < 2)
    throw std::invalid_argument("--theta expects sigma,tau1[,tau2...]");
  pmgp::Hyperparams theta;
  theta.log_lengthscales.clear();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const double v = std::stod(parts[i]);
    if (v <= 0.0)
      throw std::invalid_argument("--theta values must be positive");
    if (i == 0)
      theta.log_sigma = std::log(v);
    else
      theta.log_lengthscales.push_back(std::log(v));
  }
  return theta;
}

std::unique_ptr<std::ofstream> open_output(const std::string& path,
                                           std::ostream** out) {
  if (path.empty()) {
    *out = &std::cout;
    return nullptr;
  }
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw std::invalid_argument("cannot open output file: " + path);
  *out = file.get();
  return file;
}

std::vector<std::string> header_comments(std::uint64_t seed, const json& cfg) {
  std::vector<std::string> lines;
  lines.push_back(std::string("pmgp version=") + PMGP_VERSION);
  lines.push_back("seed=" + std::to_string(seed));
  lines.push_back("config=" + cfg.dump());
  return lines;
}

struct DataFlags {
  std::string path;
  std::string label_column = "label";
  std::string positive_labels = "1,+1,1.0";
  bool glass = false;
  bool no_normalize = false;
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_option("--data", flags.path, "Training dataset CSV")->required();
  cmd->add_option("--label-col", flags.label_column,
                  "Name of the label column (default: label)");
  cmd->add_option("--positive-labels", flags.positive_labels,
                  "Comma-separated raw label values mapped to +1");
  cmd->add_flag("--glass", flags.glass,
                "Glass rule: classes 1-4 -> +1, 5-7 -> -1");
  cmd->add_flag("--no-normalize", flags.no_normalize,
                "Skip feature normalization");
}

pmgp::Dataset load_from_flags(const DataFlags& flags,
                              pmgp::LoadReport* report = nullptr) {
  pmgp::LoadSpec spec;
  spec.label_column = flags.label_column;
  spec.positive_labels = split(flags.positive_labels, ',');
  spec.glass_rule = flags.glass;
  spec.normalize = !flags.no_normalize;
  pmgp::LoadReport local;
  pmgp::Dataset data = pmgp::load_dataset(flags.path, spec, &local);
  for (const std::string& w : local.warnings)
    std::cerr << "warning: " << w << "\n";
  if (local.rows_rejected > 0)
    std::cerr << "warning: rejected " << local.rows_rejected
              << " rows with missing or malformed values\n";
  if (report) *report = local;
  return data;
}

// Test features normalized with the training means/sds.
Eigen::MatrixXd load_test_features(const std::string& path,
                                   const std::string& label_column,
                                   const pmgp::Dataset& train) {
  Eigen::MatrixXd X = pmgp::load_feature_matrix(path, label_column);
  if (X.cols() != train.d())
    throw std::invalid_argument("test features do not match training dimension");
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    X.col(j) = (X.col(j).array() - train.feature_means[j]) / train.feature_sds[j];
  return X;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process classification with pseudo-marginal MCMC"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed/--threads/--config are valid after a subcommand
  app.set_version_flag("--version", std::string(PMGP_VERSION));

  std::string config_path;
  app.add_option("--config", config_path,
                 "Flat key-value JSON file with option defaults");
  std::uint64_t seed = 42;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "Root seed for all randomness");
  int threads = pmgp::hardware_threads();
  CLI::Option* threads_opt =
      app.add_option("--threads", threads, "Worker-thread cap");

  // ---- synth ----
  CLI::App* synth = app.add_subcommand("synth", "Generate synthetic data");
  std::size_t synth_n = 100;
  double synth_sigma = 20.0, synth_tau = 0.255;
  std::string synth_out;
  synth->add_option("--n", synth_n, "Number of points");
  synth->add_option("--sigma", synth_sigma, "Marginal variance");
  synth->add_option("--tau", synth_tau, "Global length-scale");
  synth->add_option("--out", synth_out, "Output CSV (default: stdout)");

  // ---- estimate ----
  CLI::App* estimate =
      app.add_subcommand("estimate", "Marginal-likelihood estimates and the "
                                     "spread statistic r at a fixed theta");
  DataFlags est_data;
  add_data_flags(estimate, est_data);
  std::string est_method = "ais-approx";
  std::size_t est_n_imp = 1;
  std::string est_theta;
  std::size_t est_reps = 50;
  std::string est_out;
  estimate->add_option("--method", est_method, "is | ais-prior | ais-approx");
  estimate->add_option("--n-imp", est_n_imp, "Importance samples per estimate");
  estimate->add_option("--theta", est_theta, "sigma,tau1[,tau2...] (natural scale)")
      ->required();
  estimate->add_option("--reps", est_reps, "Independent estimator repetitions");
  estimate->add_option("--out", est_out, "Output CSV (default: stdout)");

  // ---- fit ----
  CLI::App* fit = app.add_subcommand("fit", "Run pseudo-marginal MH chains");
  DataFlags fit_data;
  add_data_flags(fit, fit_data);
  std::string fit_cov = "iso";
  std::string fit_method = "ais-approx";
  std::size_t fit_n_imp = 1, fit_chains = 5, fit_iters = 2000, fit_burnin = 500,
              fit_warmup = 2000;
  std::string fit_out;
  fit->add_option("--cov", fit_cov, "iso | ard");
  fit->add_option("--method", fit_method, "is | ais-prior | ais-approx");
  fit->add_option("--n-imp", fit_n_imp, "Importance samples per estimate");
  fit->add_option("--chains", fit_chains, "Parallel chains");
  fit->add_option("--iters", fit_iters, "Recorded iterations per chain");
  fit->add_option("--burnin", fit_burnin, "Burn-in iterations");
  fit->add_option("--warmup", fit_warmup, "Adaptive warm-up iterations");
  fit->add_option("--out", fit_out, "Chain CSV (default: stdout)");

  // ---- predict ----
  CLI::App* predict = app.add_subcommand(
      "predict", "Monte Carlo predictive probabilities from a chain CSV");
  DataFlags pred_data;
  add_data_flags(predict, pred_data);
  std::string pred_chain, pred_test, pred_out;
  std::size_t pred_burnin = 500, pred_thin = 10, pred_ess_iters = 10;
  predict->add_option("--chain", pred_chain, "Chain CSV from fit")->required();
  predict->add_option("--test", pred_test, "Test-point CSV")->required();
  predict->add_option("--burnin", pred_burnin, "Chain burn-in to drop");
  predict->add_option("--thin", pred_thin, "Chain thinning factor");
  predict->add_option("--ess-iters", pred_ess_iters,
                      "Slice transitions per latent sample");
  predict->add_option("--out", pred_out, "Predictions CSV (default: stdout)");

  // ---- rstudy ----
  CLI::App* rstudy = app.add_subcommand(
      "rstudy", "Estimator-variance study on synthetic data");
  std::string rstudy_n_list = "10,50,100,500,1000";
  std::string rstudy_methods = "is,ais-prior,ais-approx";
  std::size_t rstudy_n_imp = 4, rstudy_reps = 50;
  double rstudy_sigma = 20.0, rstudy_tau = 0.255;
  std::string rstudy_out;
  rstudy->add_option("--n-list", rstudy_n_list, "Comma-separated dataset sizes");
  rstudy->add_option("--methods", rstudy_methods, "Comma-separated methods");
  rstudy->add_option("--n-imp", rstudy_n_imp, "Importance samples per estimate");
  rstudy->add_option("--reps", rstudy_reps, "Repetitions per r value");
  rstudy->add_option("--sigma", rstudy_sigma, "Generator marginal variance");
  rstudy->add_option("--tau", rstudy_tau, "Generator length-scale");
  rstudy->add_option("--out", rstudy_out, "Output CSV (default: stdout)");

  // ---- bench ----
  CLI::App* bench = app.add_subcommand(
      "bench", "Acceptance-rate benchmark rows for one dataset");
  DataFlags bench_data;
  add_data_flags(bench, bench_data);
  std::string bench_name = "dataset";
  std::string bench_cov = "iso";
  std::string bench_methods = "is,ais-approx";
  std::string bench_n_imps = "1";
  std::size_t bench_chains = 5, bench_iters = 2000, bench_burnin = 500,
              bench_warmup = 2000;
  std::string bench_out;
  bench->add_option("--name", bench_name, "Dataset name for the output table");
  bench->add_option("--cov", bench_cov, "iso | ard");
  bench->add_option("--methods", bench_methods, "Comma-separated methods");
  bench->add_option("--n-imps", bench_n_imps, "Comma-separated N_imp values");
  bench->add_option("--chains", bench_chains, "Parallel chains");
  bench->add_option("--iters", bench_iters, "Recorded iterations per chain");
  bench->add_option("--burnin", bench_burnin, "Burn-in iterations");
  bench->add_option("--warmup", bench_warmup, "Adaptive warm-up iterations");
  bench->add_option("--out", bench_out, "Output CSV (default: stdout)");

  // ---- oracle ----
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Quadrature marginal likelihood (n <= 3 only)");
  DataFlags oracle_data;
  add_data_flags(oracle, oracle_data);
  std::string oracle_theta;
  int oracle_nodes = 200;
  oracle->add_option("--theta", oracle_theta,
                     "sigma,tau1[,tau2...] (natural scale)")->required();
  oracle->add_option("--nodes", oracle_nodes, "Quadrature nodes per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgument;
  }

  try {
    const json cfg = load_config_file(config_path);
    fallback(seed_opt, cfg, "seed", seed);
    fallback(threads_opt, cfg, "threads", threads);
    threads = std::max(threads, 1);

    if (app.got_subcommand(synth)) {
      fallback(synth->get_option("--n"), cfg, "n", synth_n);
      fallback(synth->get_option("--sigma"), cfg, "sigma", synth_sigma);
      fallback(synth->get_option("--tau"), cfg, "tau", synth_tau);
      fallback(synth->get_option("--out"), cfg, "out", synth_out);
      const pmgp::Dataset data =
          pmgp::gen_synthetic(synth_n, synth_sigma, synth_tau, seed);
      std::ostream* out = nullptr;
      auto file = open_output(synth_out, &out);
      const json effective = {
          {"n", synth_n}, {"sigma", synth_sigma}, {"tau", synth_tau}};
      pmgp::write_dataset_csv(*out, data, header_comments(seed, effective));
      return kExitOk;
    }

    if (app.got_subcommand(estimate)) {
      fallback(estimate->get_option("--method"), cfg, "method", est_method);
      fallback(estimate->get_option("--n-imp"), cfg, "n_imp", est_n_imp);
      fallback(estimate->get_option("--reps"), cfg, "reps", est_reps);
      const pmgp::Dataset data = load_from_flags(est_data);
      const pmgp::Hyperparams theta = parse_theta(est_theta);
      theta.validate(data.d());

      pmgp::EstimatorConfig config;
      config.method = pmgp::estimator_method_from_string(est_method);
      config.n_imp = est_n_imp;
      config.n_threads = 1;

      const pmgp::GramMatrix G = pmgp::gram(data.X, theta);
      pmgp::LaplaceResult la;
      if (config.needs_laplace()) {
        la = pmgp::laplace_approx(data.y, G);
        if (!la.converged)
          throw pmgp::NumericalError("Laplace approximation did not converge");
      }

      pmgp::RngStream rng(seed);
      std::vector<double> log_values(est_reps);
      pmgp::parallel_for(est_reps, threads, [&](std::size_t rep) {
        pmgp::RngStream rep_rng = rng.substream(rep);
        log_values[rep] = pmgp::estimate_log_marginal(
                              config, data.y, G,
                              config.needs_laplace() ? &la : nullptr, rep_rng)
                              .log_value;
      });

      std::ostream* out = nullptr;
      auto file = open_output(est_out, &out);
      const json effective = {{"data", est_data.path},
                              {"method", est_method},
                              {"n_imp", est_n_imp},
                              {"reps", est_reps}};
      for (const std::string& line : header_comments(seed, effective))
        *out << "# " << line << "\n";
      *out << "rep,log_marginal,log10_marginal\n";
      *out << std::setprecision(17);
      std::vector<double> log10_values(est_reps);
      for (std::size_t rep = 0; rep < est_reps; ++rep) {
        log10_values[rep] = log_values[rep] / std::log(10.0);
        *out << rep << ',' << log_values[rep] << ',' << log10_values[rep]
             << "\n";
      }
      if (est_reps >= 2) {
        double mean = 0.0;
        for (double v : log10_values) mean += v;
        mean /= static_cast<double>(est_reps);
        double ss = 0.0;
        for (double v : log10_values) ss += (v - mean) * (v - mean);
        const double r = std::sqrt(ss / static_cast<double>(est_reps - 1));
        *out << "# r=" << r << "\n";
        if (!est_out.empty()) std::cout << "r=" << r << "\n";
      }
      return kExitOk;
    }

    if (app.got_subcommand(fit)) {
      fallback(fit->get_option("--cov"), cfg, "cov", fit_cov);
      fallback(fit->get_option("--method"), cfg, "method", fit_method);
      fallback(fit->get_option("--n-imp"), cfg, "n_imp", fit_n_imp);
      fallback(fit->get_option("--chains"), cfg, "chains", fit_chains);
      fallback(fit->get_option("--iters"), cfg, "iters", fit_iters);
      fallback(fit->get_option("--burnin"), cfg, "burnin", fit_burnin);
      fallback(fit->get_option("--warmup"), cfg, "warmup", fit_warmup);
      const pmgp::Dataset data = load_from_flags(fit_data);

      pmgp::ChainConfig config;
      config.n_chains = fit_chains;
      config.n_iter = fit_iters;
      config.burnin = fit_burnin;
      config.warmup_iters = fit_warmup;
      config.estimator.method = pmgp::estimator_method_from_string(fit_method);
      config.estimator.n_imp = fit_n_imp;
      config.priors = fit_cov == "ard" ? pmgp::PriorSpec::ard_covariance(data.d())
                                       : pmgp::PriorSpec::isotropic(data.d());
      config.seed = seed;
      config.n_threads = threads;

      const std::vector<pmgp::ChainRecord> records =
          pmgp::run_chains(data, config);

      std::ostream* out = nullptr;
      auto file = open_output(fit_out, &out);
      const json effective = {{"data", fit_data.path}, {"cov", fit_cov},
                              {"method", fit_method},  {"n_imp", fit_n_imp},
                              {"chains", fit_chains},  {"iters", fit_iters},
                              {"burnin", fit_burnin},  {"warmup", fit_warmup}};
      pmgp::write_chains_csv(*out, records, header_comments(seed, effective));
      std::cerr << "pooled acceptance: "
                << 100.0 * pmgp::pooled_acceptance(records) << "%\n";
      return kExitOk;
    }

    if (app.got_subcommand(predict)) {
      const pmgp::Dataset data = load_from_flags(pred_data);
      std::ifstream chain_in(pred_chain);
      if (!chain_in)
        throw std::invalid_argument("cannot open chain CSV: " + pred_chain);
      const std::vector<pmgp::Hyperparams> thetas =
          pmgp::read_chain_thetas(chain_in, pred_burnin, pred_thin);
      if (thetas.empty())
        throw std::invalid_argument("no theta samples left after burn-in/thinning");
      const Eigen::MatrixXd X_test =
          load_test_features(pred_test, pred_data.label_column, data);

      pmgp::RngStream rng(seed);
      const std::vector<pmgp::PredictionRow> rows = pmgp::predictive_table(
          thetas, data, X_test, pred_ess_iters, rng, threads);

      std::ostream* out = nullptr;
      auto file = open_output(pred_out, &out);
      const json effective = {{"data", pred_data.path},
                              {"chain", pred_chain},
                              {"test", pred_test},
                              {"burnin", pred_burnin},
                              {"thin", pred_thin},
                              {"ess_iters", pred_ess_iters},
                              {"samples", thetas.size()}};
      for (const std::string& line : header_comments(seed, effective))
        *out << "# " << line << "\n";
      *out << "test_index,mean_prob,mc_std_error\n";
      *out << std::setprecision(17);
      for (const pmgp::PredictionRow& row : rows)
        *out << row.test_index << ',' << row.mean_prob << ','
             << row.mc_std_error << "\n";
      return kExitOk;
    }

    if (app.got_subcommand(rstudy)) {
      fallback(rstudy->get_option("--n-list"), cfg, "n_list", rstudy_n_list);
      fallback(rstudy->get_option("--methods"), cfg, "methods", rstudy_methods);
      fallback(rstudy->get_option("--n-imp"), cfg, "n_imp", rstudy_n_imp);
      fallback(rstudy->get_option("--reps"), cfg, "reps", rstudy_reps);
      fallback(rstudy->get_option("--sigma"), cfg, "sigma", rstudy_sigma);
      fallback(rstudy->get_option("--tau"), cfg, "tau", rstudy_tau);

      pmgp::RStudyOptions options;
      options.n_list.clear();
      for (const std::string& tok : split(rstudy_n_list, ','))
        options.n_list.push_back(std::stoull(tok));
      options.methods.clear();
      for (const std::string& tok : split(rstudy_methods, ','))
        options.methods.push_back(pmgp::estimator_method_from_string(tok));
      options.n_imp = rstudy_n_imp;
      options.reps = rstudy_reps;
      options.sigma = rstudy_sigma;
      options.tau = rstudy_tau;
      options.n_threads = threads;
      if (cfg.contains("prelim_warmup"))
        options.prelim_warmup = cfg.at("prelim_warmup").get<std::size_t>();
      if (cfg.contains("prelim_iters"))
        options.prelim_iters = cfg.at("prelim_iters").get<std::size_t>();
      if (cfg.contains("prelim_burnin"))
        options.prelim_burnin = cfg.at("prelim_burnin").get<std::size_t>();

      const std::vector<pmgp::RStudyResult> results =
          pmgp::r_study(options, seed);

      std::ostream* out = nullptr;
      auto file = open_output(rstudy_out, &out);
      const json effective = {{"n_list", rstudy_n_list},
                              {"methods", rstudy_methods},
                              {"n_imp", rstudy_n_imp},
                              {"reps", rstudy_reps},
                              {"sigma", rstudy_sigma},
                              {"tau", rstudy_tau}};
      pmgp::write_rstudy_csv(*out, results, header_comments(seed, effective));
      return kExitOk;
    }

    if (app.got_subcommand(bench)) {
      fallback(bench->get_option("--cov"), cfg, "cov", bench_cov);
      fallback(bench->get_option("--methods"), cfg, "methods", bench_methods);
      fallback(bench->get_option("--n-imps"), cfg, "n_imps", bench_n_imps);
      fallback(bench->get_option("--chains"), cfg, "chains", bench_chains);
      fallback(bench->get_option("--iters"), cfg, "iters", bench_iters);
      fallback(bench->get_option("--burnin"), cfg, "burnin", bench_burnin);
      fallback(bench->get_option("--warmup"), cfg, "warmup", bench_warmup);
      const pmgp::Dataset data = load_from_flags(bench_data);

      pmgp::ChainConfig base;
      base.n_chains = bench_chains;
      base.n_iter = bench_iters;
      base.burnin = bench_burnin;
      base.warmup_iters = bench_warmup;
      base.n_threads = threads;

      std::vector<pmgp::BenchmarkRow> rows;
      for (const std::string& method_name : split(bench_methods, ',')) {
        for (const std::string& n_imp_tok : split(bench_n_imps, ',')) {
          rows.push_back(pmgp::acceptance_benchmark(
              data, bench_name, bench_cov == "ard",
              pmgp::estimator_method_from_string(method_name),
              std::stoull(n_imp_tok), seed, base));
        }
      }

      std::ostream* out = nullptr;
      auto file = open_output(bench_out, &out);
      const json effective = {{"data", bench_data.path}, {"cov", bench_cov},
                              {"methods", bench_methods}, {"n_imps", bench_n_imps},
                              {"chains", bench_chains},   {"iters", bench_iters},
                              {"burnin", bench_burnin},   {"warmup", bench_warmup}};
      pmgp::write_benchmark_csv(*out, rows, header_comments(seed, effective));
      return kExitOk;
    }

    if (app.got_subcommand(oracle)) {
      DataFlags flags = oracle_data;
      flags.no_normalize = true;  // toy fixtures keep their exact coordinates
      const pmgp::Dataset data = load_from_flags(flags);
      if (data.n() > 3)
        throw std::invalid_argument("oracle supports n <= 3 only");
      const pmgp::Hyperparams theta = parse_theta(oracle_theta);
      theta.validate(data.d());
      const pmgp::GramMatrix G = pmgp::gram(data.X, theta);
      const double log_marginal =
          pmgp::quadrature_log_marginal(data, G, oracle_nodes);
      std::cout << std::setprecision(17) << "log_marginal=" << log_marginal
                << "\nmarginal=" << std::exp(log_marginal) << "\n";
      return kExitOk;
    }

    throw std::invalid_argument("no subcommand selected");
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const pmgp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
