// Apache License, Version 2.0, refer to LICENSE.txt

#include <cmath>

#include <doctest.h>

#include "pmgp/errors.hpp"
#include "pmgp/kernel.hpp"
#include "pmgp/rng.hpp"

using pmgp::GramMatrix;
using pmgp::Hyperparams;

namespace {

Hyperparams iso_theta(double sigma, double tau) {
  Hyperparams theta;
  theta.log_sigma = std::log(sigma);
  theta.log_lengthscales = {std::log(tau)};
  return theta;
}

// Two points of the toy problem used throughout: x1 = (-1,-1), x2 = (1,1),
// sigma = 15, tau = exp(-1).
Eigen::MatrixXd toy_inputs() {
  Eigen::MatrixXd X(2, 2);
  X << -1.0, -1.0, 1.0, 1.0;
  return X;
}

}  // namespace

TEST_CASE("kernel at zero distance returns sigma exactly") {
  const Hyperparams theta = iso_theta(15.0, 0.3);
  Eigen::VectorXd x(3);
  x << 0.4, -2.0, 7.5;
  CHECK(pmgp::kernel_eval(x, x, theta) == theta.sigma());
}

TEST_CASE("kernel matches direct evaluation on the toy points") {
  const Hyperparams theta = iso_theta(15.0, std::exp(-1.0));
  const Eigen::MatrixXd X = toy_inputs();
  const double k = pmgp::kernel_eval(X.row(0), X.row(1), theta);
  // 15 exp(-4 e^2): squared distance 8, tau^2 = e^-2.
  const double expected = 15.0 * std::exp(-4.0 * std::exp(2.0));
  CHECK(k == doctest::Approx(expected).epsilon(1e-14));
  CHECK(k == doctest::Approx(2.19e-12).epsilon(0.01));
}

TEST_CASE("kernel at one length-scale separation") {
  const Hyperparams theta = iso_theta(20.0, 0.255);
  Eigen::VectorXd a(2), b(2);
  a << 0.255, 0.0;
  b << 0.0, 0.0;
  CHECK(pmgp::kernel_eval(a, b, theta) ==
        doctest::Approx(20.0 * std::exp(-0.5)).epsilon(1e-14));
  CHECK(pmgp::kernel_eval(a, b, theta) == doctest::Approx(12.13).epsilon(1e-3));
}

TEST_CASE("kernel symmetry is exact and values stay in (0, sigma]") {
  pmgp::RngStream rng(7);
  Hyperparams theta;
  theta.log_sigma = std::log(3.0);
  theta.log_lengthscales = {std::log(0.2), std::log(1.7), std::log(0.9)};
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::VectorXd a = rng.normal_vector(3);
    const Eigen::VectorXd b = rng.normal_vector(3);
    const double kab = pmgp::kernel_eval(a, b, theta);
    const double kba = pmgp::kernel_eval(b, a, theta);
    CHECK(kab == kba);
    CHECK(kab > 0.0);
    CHECK(kab <= theta.sigma());
  }
}

TEST_CASE("increasing any squared distance strictly decreases the kernel") {
  const Hyperparams theta = iso_theta(2.0, 0.7);
  pmgp::RngStream rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd a = rng.normal_vector(2);
    Eigen::VectorXd b = rng.normal_vector(2);
    const double base = pmgp::kernel_eval(a, b, theta);
    Eigen::VectorXd b_far = b;
    const int coord = rep % 2;
    // Move b away from a along one coordinate.
    b_far[coord] = a[coord] + 1.5 * (b[coord] - a[coord]) +
                   (b[coord] >= a[coord] ? 0.1 : -0.1);
    CHECK(pmgp::kernel_eval(a, b_far, theta) < base);
  }
}

TEST_CASE("kernel rejects dimension mismatch") {
  const Hyperparams theta = iso_theta(1.0, 1.0);
  Eigen::VectorXd a(2), b(3);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(pmgp::kernel_eval(a, b, theta), std::invalid_argument);
}

TEST_CASE("ARD length-scale count must match the dimension") {
  Hyperparams theta;
  theta.log_lengthscales = {0.0, 0.0};
  Eigen::VectorXd a(3), b(3);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(pmgp::kernel_eval(a, b, theta), std::invalid_argument);
}

TEST_CASE("gram on a single point") {
  const Hyperparams theta = iso_theta(4.0, 1.0);
  Eigen::MatrixXd X(1, 1);
  X << 0.3;
  const GramMatrix G = pmgp::gram(X, theta);
  CHECK(G.K(0, 0) == 4.0);
  CHECK(G.jitter == 0.0);
  CHECK(G.chol(0, 0) == doctest::Approx(2.0));
  CHECK(G.log_det == doctest::Approx(std::log(4.0)));
}

TEST_CASE("gram entries reproduce kernel_eval exactly") {
  const Hyperparams theta = iso_theta(15.0, std::exp(-1.0));
  const Eigen::MatrixXd X = toy_inputs();
  const GramMatrix G = pmgp::gram(X, theta);
  CHECK(G.K(0, 0) == 15.0);
  CHECK(G.K(1, 1) == 15.0);
  const double k01 = pmgp::kernel_eval(X.row(0), X.row(1), theta);
  CHECK(G.K(0, 1) == k01);  // bit-for-bit
  CHECK(G.K(1, 0) == k01);
}

TEST_CASE("gram factorization satisfies chol chol^T = K + jitter I") {
  pmgp::RngStream rng(3);
  Eigen::MatrixXd X(12, 2);
  for (Eigen::Index i = 0; i < X.size(); ++i)
    X(i / 2, i % 2) = rng.uniform();
  const Hyperparams theta = iso_theta(20.0, 0.255);
  const GramMatrix G = pmgp::gram(X, theta);

  Eigen::MatrixXd target = G.K;
  target.diagonal().array() += G.jitter;
  const Eigen::MatrixXd rebuilt = G.chol * G.chol.transpose();
  CHECK((rebuilt - target).norm() <= 1e-10 * target.norm());
  CHECK(G.log_det ==
        doctest::Approx(2.0 * G.chol.diagonal().array().log().sum()));
}

TEST_CASE("duplicated rows force a positive jitter but still factorize") {
  Eigen::MatrixXd X(3, 2);
  X << 0.5, 0.5, 0.5, 0.5, 0.1, 0.9;
  const Hyperparams theta = iso_theta(2.0, 1.0);
  const GramMatrix G = pmgp::gram(X, theta);
  CHECK(G.jitter > 0.0);
  Eigen::MatrixXd target = G.K;
  target.diagonal().array() += G.jitter;
  CHECK((G.chol * G.chol.transpose() - target).norm() <=
        1e-10 * target.norm());
}

TEST_CASE("hyperparameter vector round trip") {
  Hyperparams theta;
  theta.log_sigma = 0.7;
  theta.log_lengthscales = {-0.3, 0.1, 2.0};
  const Hyperparams back = Hyperparams::from_vector(theta.as_vector());
  CHECK(back.log_sigma == theta.log_sigma);
  CHECK(back.log_lengthscales == theta.log_lengthscales);
}
