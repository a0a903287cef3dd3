// Apache License, Version 2.0, refer to LICENSE.txt
//
// Python bindings for the main operations: kernels, model densities, the
// Laplace approximation, slice sampling, the marginal-likelihood estimators,
// the pseudo-marginal chain, prediction, and the study harness.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pmgp/dataset_io.hpp"
#include "pmgp/errors.hpp"
#include "pmgp/estimators.hpp"
#include "pmgp/gaussian.hpp"
#include "pmgp/kernel.hpp"
#include "pmgp/laplace.hpp"
#include "pmgp/model.hpp"
#include "pmgp/pm_mcmc.hpp"
#include "pmgp/predict.hpp"
#include "pmgp/quadrature.hpp"
#include "pmgp/rng.hpp"
#include "pmgp/slice.hpp"
#include "pmgp/studies.hpp"
#include "pmgp/synthetic.hpp"

namespace py = pybind11;
using namespace pmgp;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian process classification with pseudo-marginal MCMC";

  py::register_exception<NumericalError>(m, "NumericalError");

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("substream", &RngStream::substream, py::arg("salt"))
      .def("uniform", py::overload_cast<>(&RngStream::uniform))
      .def("normal", &RngStream::normal)
      .def_property_readonly("seed", &RngStream::seed);

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init([](double log_sigma, std::vector<double> log_lengthscales) {
             Hyperparams theta;
             theta.log_sigma = log_sigma;
             theta.log_lengthscales = std::move(log_lengthscales);
             return theta;
           }),
           py::arg("log_sigma"), py::arg("log_lengthscales"))
      .def_readwrite("log_sigma", &Hyperparams::log_sigma)
      .def_readwrite("log_lengthscales", &Hyperparams::log_lengthscales)
      .def_property_readonly("sigma", &Hyperparams::sigma)
      .def("as_vector", &Hyperparams::as_vector)
      .def("__repr__", [](const Hyperparams& theta) {
        std::ostringstream os;
        os << "Hyperparams(log_sigma=" << theta.log_sigma << ", log_lengthscales=[";
        for (std::size_t i = 0; i < theta.log_lengthscales.size(); ++i)
          os << (i ? ", " : "") << theta.log_lengthscales[i];
        os << "])";
        return os.str();
      });

  py::class_<GramMatrix>(m, "GramMatrix")
      .def_readonly("K", &GramMatrix::K)
      .def_readonly("chol", &GramMatrix::chol)
      .def_readonly("jitter", &GramMatrix::jitter)
      .def_readonly("log_det", &GramMatrix::log_det);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](Eigen::MatrixXd X, Eigen::VectorXd y) {
             Dataset data;
             data.X = std::move(X);
             data.y = std::move(y);
             data.feature_means = Eigen::VectorXd::Zero(data.X.cols());
             data.feature_sds = Eigen::VectorXd::Ones(data.X.cols());
             data.validate();
             return data;
           }),
           py::arg("X"), py::arg("y"))
      .def_readonly("X", &Dataset::X)
      .def_readonly("y", &Dataset::y)
      .def_readonly("feature_means", &Dataset::feature_means)
      .def_readonly("feature_sds", &Dataset::feature_sds)
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("d", &Dataset::d);

  py::class_<PriorSpec>(m, "PriorSpec")
      .def(py::init<>())
      .def_static("isotropic", &PriorSpec::isotropic, py::arg("d"))
      .def_static("ard_covariance", &PriorSpec::ard_covariance, py::arg("d"))
      .def_readwrite("sigma_shape", &PriorSpec::sigma_shape)
      .def_readwrite("sigma_rate", &PriorSpec::sigma_rate)
      .def_readwrite("tau_shape", &PriorSpec::tau_shape)
      .def_readwrite("tau_rate", &PriorSpec::tau_rate)
      .def_readwrite("ard", &PriorSpec::ard);

  py::class_<GaussianRef>(m, "GaussianRef")
      .def_readonly("mean", &GaussianRef::mean)
      .def_readonly("cov_chol", &GaussianRef::cov_chol)
      .def_readonly("log_det", &GaussianRef::log_det)
      .def("sample", &GaussianRef::sample, py::arg("rng"))
      .def("log_pdf", &GaussianRef::log_pdf, py::arg("f"))
      .def_static("prior", &GaussianRef::prior, py::arg("gram"));

  py::class_<LaplaceResult>(m, "LaplaceResult")
      .def_readonly("q", &LaplaceResult::q)
      .def_readonly("f_hat", &LaplaceResult::f_hat)
      .def_readonly("log_marginal_la", &LaplaceResult::log_marginal_la)
      .def_readonly("iterations", &LaplaceResult::iterations)
      .def_readonly("converged", &LaplaceResult::converged);

  py::enum_<EstimatorMethod>(m, "EstimatorMethod")
      .value("IS", EstimatorMethod::kIS)
      .value("AIS_PRIOR", EstimatorMethod::kAISPrior)
      .value("AIS_APPROX", EstimatorMethod::kAISApprox);

  py::class_<TemperatureSchedule>(m, "TemperatureSchedule")
      .def_readonly("betas", &TemperatureSchedule::betas)
      .def_property_readonly("segments", &TemperatureSchedule::segments);

  py::class_<LogMarginalEstimate>(m, "LogMarginalEstimate")
      .def_readonly("log_value", &LogMarginalEstimate::log_value)
      .def_readonly("log_weights", &LogMarginalEstimate::log_weights)
      .def_readonly("method", &LogMarginalEstimate::method)
      .def_readonly("n_imp", &LogMarginalEstimate::n_imp)
      .def_readonly("ess_stalls", &LogMarginalEstimate::ess_stalls);

  py::class_<EstimatorConfig>(m, "EstimatorConfig")
      .def(py::init<>())
      .def_readwrite("method", &EstimatorConfig::method)
      .def_readwrite("n_imp", &EstimatorConfig::n_imp)
      .def_readwrite("ess_steps_per_level", &EstimatorConfig::ess_steps_per_level)
      .def_readwrite("n_threads", &EstimatorConfig::n_threads);

  py::class_<ChainConfig>(m, "ChainConfig")
      .def(py::init<>())
      .def_readwrite("n_chains", &ChainConfig::n_chains)
      .def_readwrite("n_iter", &ChainConfig::n_iter)
      .def_readwrite("burnin", &ChainConfig::burnin)
      .def_readwrite("warmup_iters", &ChainConfig::warmup_iters)
      .def_readwrite("estimator", &ChainConfig::estimator)
      .def_readwrite("priors", &ChainConfig::priors)
      .def_readwrite("seed", &ChainConfig::seed)
      .def_readwrite("n_threads", &ChainConfig::n_threads);

  py::class_<ChainRecord>(m, "ChainRecord")
      .def_readonly("chain_id", &ChainRecord::chain_id)
      .def_readonly("thetas", &ChainRecord::thetas)
      .def_readonly("log_estimates", &ChainRecord::log_estimates)
      .def_readonly("accept_flags", &ChainRecord::accept_flags)
      .def_readonly("acceptance_rate", &ChainRecord::acceptance_rate);

  m.def("kernel_eval", &kernel_eval, py::arg("xi"), py::arg("xj"),
        py::arg("theta"));
  m.def("gram", &gram, py::arg("X"), py::arg("theta"));
  m.def("log_norm_cdf", py::vectorize(&log_norm_cdf), py::arg("x"));
  m.def("log_likelihood", &log_likelihood, py::arg("f"), py::arg("y"));
  m.def("log_gp_prior", &log_gp_prior, py::arg("f"), py::arg("gram"));
  m.def("log_hyperprior", &log_hyperprior, py::arg("theta"), py::arg("priors"));
  m.def("log_unnorm_posterior_f", &log_unnorm_posterior_f, py::arg("f"),
        py::arg("y"), py::arg("gram"));

  m.def("laplace_approx", &laplace_approx, py::arg("y"), py::arg("gram"),
        py::arg("with_covariance") = true);

  m.def("geometric_schedule", &geometric_schedule, py::arg("n"));
  m.def("logsumexp", [](const std::vector<double>& v) { return logsumexp(v); },
        py::arg("values"));

  m.def(
      "is_estimate",
      [](const Eigen::VectorXd& y, const GramMatrix& G, const LaplaceResult& la,
         std::size_t n_imp, std::uint64_t seed, int n_threads) {
        RngStream rng(seed);
        return is_estimate(y, G, la, n_imp, rng, n_threads);
      },
      py::arg("y"), py::arg("gram"), py::arg("laplace"), py::arg("n_imp"),
      py::arg("seed"), py::arg("n_threads") = 1);

  m.def(
      "ais_estimate",
      [](const Eigen::VectorXd& y, const GramMatrix& G, const LaplaceResult* la,
         const TemperatureSchedule& schedule, std::size_t n_imp,
         std::size_t ess_steps_per_level, std::uint64_t seed, int n_threads) {
        RngStream rng(seed);
        const AnnealStart start =
            la ? AnnealStart::from_approx(*la) : AnnealStart::from_prior();
        return ais_estimate(y, G, start, schedule, n_imp, ess_steps_per_level,
                            rng, n_threads);
      },
      py::arg("y"), py::arg("gram"), py::arg("laplace").none(true),
      py::arg("schedule"), py::arg("n_imp"), py::arg("ess_steps_per_level") = 1,
      py::arg("seed") = 0, py::arg("n_threads") = 1);

  m.def(
      "ess_step",
      [](const Eigen::VectorXd& f, const GaussianRef& reference,
         const std::function<double(const Eigen::VectorXd&)>& log_residual,
         double beta, RngStream& rng) {
        TemperedTarget target{&reference, log_residual, beta};
        return ess_step(f, target, rng);
      },
      py::arg("f"), py::arg("reference"), py::arg("log_residual"),
      py::arg("beta"), py::arg("rng"));

  m.def("warmup_adapt",
        [](const Dataset& data, const PriorSpec& priors, std::size_t n_iter,
           std::uint64_t seed) {
          RngStream rng(seed);
          const ProposalSpec spec =
              warmup_adapt(data, priors, std::nullopt, n_iter, rng);
          return py::make_tuple(spec.step_scales(),
                                spec.final_window_acceptance,
                                spec.warmup_iterations);
        },
        py::arg("data"), py::arg("priors"), py::arg("n_iter") = 2000,
        py::arg("seed") = 0);

  m.def("run_chains",
        [](const Dataset& data, const ChainConfig& config) {
          return run_chains(data, config);
        },
        py::arg("data"), py::arg("config"));

  m.def("gen_synthetic",
        [](std::size_t n, double sigma, double tau, std::uint64_t seed) {
          return gen_synthetic(n, sigma, tau, seed);
        },
        py::arg("n"), py::arg("sigma") = 20.0, py::arg("tau") = 0.255,
        py::arg("seed") = 0);

  m.def(
      "r_statistic",
      [](const Dataset& data, const Hyperparams& theta,
         const EstimatorConfig& config, std::size_t reps, std::uint64_t seed) {
        RngStream rng(seed);
        return r_statistic(data, theta, config, reps, rng);
      },
      py::arg("data"), py::arg("theta"), py::arg("config"), py::arg("reps") = 50,
      py::arg("seed") = 0);

  m.def("quadrature_marginal", &quadrature_marginal, py::arg("data"),
        py::arg("gram"), py::arg("nodes_per_axis") = 200);
  m.def("quadrature_log_marginal", &quadrature_log_marginal, py::arg("data"),
        py::arg("gram"), py::arg("nodes_per_axis") = 200);

  m.def(
      "sample_latents",
      [](const std::vector<Hyperparams>& thetas, const Dataset& data,
         std::size_t ess_iters, std::uint64_t seed, int n_threads) {
        RngStream rng(seed);
        return sample_latents(thetas, data, ess_iters, rng, n_threads);
      },
      py::arg("theta_samples"), py::arg("data"), py::arg("ess_iters") = 10,
      py::arg("seed") = 0, py::arg("n_threads") = 1);

  m.def("predict_prob", &predict_prob, py::arg("x_star"), py::arg("f_sample"),
        py::arg("theta_sample"), py::arg("data"));

  m.def("load_dataset",
        [](const std::string& path, const std::string& label_column,
           const std::vector<std::string>& positive_labels, bool glass_rule,
           bool normalize) {
          LoadSpec spec;
          spec.label_column = label_column;
          spec.positive_labels = positive_labels;
          spec.glass_rule = glass_rule;
          spec.normalize = normalize;
          return load_dataset(path, spec);
        },
        py::arg("path"), py::arg("label_column") = "label",
        py::arg("positive_labels") = std::vector<std::string>{"1", "+1", "1.0"},
        py::arg("glass_rule") = false, py::arg("normalize") = true);

#ifdef PMGP_VERSION
  m.attr("__version__") = PMGP_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
