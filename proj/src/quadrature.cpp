// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pmgp/estimators.hpp"

namespace pmgp {

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need n >= 1");

  // The eigen decomposition is the expensive part and callers (the exact-MH
  // chain in particular) request the same order repeatedly.
  static std::mutex cache_mutex;
  static std::map<int, std::pair<Eigen::VectorXd, Eigen::VectorXd>> cache;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Eigen::VectorXd nodes = solver.eigenvalues();
  Eigen::VectorXd weights(n);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    weights[i] = sqrt_pi * v0 * v0;
  }

  std::lock_guard lock(cache_mutex);
  return cache.emplace(n, std::make_pair(std::move(nodes), std::move(weights)))
      .first->second;
}

namespace {

struct WhitenedGrid {
  std::vector<double> log_weights;  // per-axis, normalized for N(0,1)
  std::vector<double> points;       // per-axis standard-normal abscissae
  int m = 0;
};

WhitenedGrid standard_normal_grid(int nodes_per_axis) {
  const auto& [nodes, weights] = gauss_hermite(nodes_per_axis);
  WhitenedGrid grid;
  grid.m = nodes_per_axis;
  grid.log_weights.resize(nodes_per_axis);
  grid.points.resize(nodes_per_axis);
  const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
  const double sqrt2 = std::sqrt(2.0);
  for (int i = 0; i < nodes_per_axis; ++i) {
    // E[g(xi)] = sum_i w_i/sqrt(pi) g(sqrt(2) x_i) for xi ~ N(0,1).
    grid.log_weights[i] = std::log(weights[i]) - log_sqrt_pi;
    grid.points[i] = sqrt2 * nodes[i];
  }
  return grid;
}

// Iterates the tensor grid, calling visit(f, log_weight) per node. The f
// buffer is reused across nodes.
template <typename Visit>
void for_each_node(const Dataset& data, const GramMatrix& G,
                   int nodes_per_axis, Visit&& visit) {
  const Eigen::Index n = data.n();
  if (n > 3)
    throw std::invalid_argument("quadrature oracle supports n <= 3 only");
  const WhitenedGrid grid = standard_normal_grid(nodes_per_axis);
  const int m = grid.m;

  Eigen::VectorXd xi(n);
  Eigen::VectorXd f(n);
  const long total = static_cast<long>(std::pow(static_cast<double>(m),
                                                static_cast<double>(n)));
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    double log_w = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      const int i = static_cast<int>(rem % m);
      rem /= m;
      xi[a] = grid.points[static_cast<std::size_t>(i)];
      log_w += grid.log_weights[static_cast<std::size_t>(i)];
    }
    f.noalias() = G.chol.triangularView<Eigen::Lower>() * xi;
    visit(f, log_w);
  }
}

}  // namespace

double quadrature_log_marginal(const Dataset& data, const GramMatrix& G,
                               int nodes_per_axis) {
  // Streaming max-shifted accumulation; the grid can hold 8e6 nodes.
  double max_term = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for_each_node(data, G, nodes_per_axis,
                [&](const Eigen::VectorXd& f, double log_w) {
                  const double v = log_w + log_likelihood(f, data.y);
                  if (v <= max_term) {
                    acc += std::exp(v - max_term);
                  } else {
                    acc = acc * std::exp(max_term - v) + 1.0;
                    max_term = v;
                  }
                });
  if (max_term == -std::numeric_limits<double>::infinity()) return max_term;
  return max_term + std::log(acc);
}

double quadrature_marginal(const Dataset& data, const GramMatrix& G,
                           int nodes_per_axis) {
  return std::exp(quadrature_log_marginal(data, G, nodes_per_axis));
}

PosteriorMoments quadrature_posterior_moments(const Dataset& data,
                                              const GramMatrix& G,
                                              int nodes_per_axis) {
  const Eigen::Index n = data.n();
  double z = 0.0;
  Eigen::VectorXd first = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  // Normalizing against the max log term keeps the accumulation stable.
  const double log_shift =
      quadrature_log_marginal(data, G, nodes_per_axis);
  for_each_node(data, G, nodes_per_axis,
                [&](const Eigen::VectorXd& f, double log_w) {
                  const double w =
                      std::exp(log_w + log_likelihood(f, data.y) - log_shift);
                  z += w;
                  first += w * f;
                  second += w * (f * f.transpose());
                });
  PosteriorMoments mom;
  mom.mean = first / z;
  mom.cov = second / z - mom.mean * mom.mean.transpose();
  return mom;
}

}  // namespace pmgp
