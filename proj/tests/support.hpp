#pragma once

// Shared fixtures for the unit tests and the acceptance binary.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "bpreg/fit.hpp"
#include "bpreg/model.hpp"
#include "bpreg/random.hpp"

namespace testing_support {

struct Instance {
  bpreg::ModelSpec spec;
  Eigen::VectorXd theta;
};

// Intercept plus U(-1, 1) covariates in each design.
inline Eigen::MatrixXd random_design(Eigen::Index n, Eigen::Index cols,
                                     std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd M(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    M(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < cols; ++j) M(i, j) = u(gen);
  }
  return M;
}

// Random well-posed instance: theta entries in [-0.5, 0.5] on top of a
// baseline (0.2, 0.8) intercept pair; y drawn from the model itself.
inline Instance random_instance(Eigen::Index n, Eigen::Index p, Eigen::Index q,
                                std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const Eigen::MatrixXd X = random_design(n, p, gen);
  const Eigen::MatrixXd Z = random_design(n, q, gen);
  Eigen::VectorXd theta(p + q);
  for (Eigen::Index j = 0; j < p + q; ++j) theta(j) = u(gen);
  theta(0) += 0.2;
  theta(p) += 0.8;
  const bpreg::ModelSpec design(Eigen::VectorXd::Ones(n), X, Z);
  bpreg::RandomStream rng(seed ^ 0x9e3779b97f4a7c15ULL);
  return {design.with_response(bpreg::simulate_response(design, theta, rng)),
          theta};
}

// Central difference gradient of the log-likelihood.
inline Eigen::VectorXd fd_gradient(const bpreg::ModelSpec& spec,
                                   const Eigen::VectorXd& theta, double h) {
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(j) += h;
    tm(j) -= h;
    g(j) = (bpreg::log_likelihood(spec, tp) - bpreg::log_likelihood(spec, tm)) /
           (2.0 * h);
  }
  return g;
}

}  // namespace testing_support
