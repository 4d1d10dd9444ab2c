#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bpreg/model.hpp"
#include "bpreg/random.hpp"

namespace bpreg {

enum class Method { mle, cox_snell, firth, bootstrap };

// "mle", "cox_snell", "firth", "boot".
std::string method_name(Method m);
// Accepts the names above plus "bootstrap" and "coxsnell".
Method parse_method(std::string_view name);

struct FitOptions {
  int max_iter = 200;
  double tol_score = 1e-8;
  double tol_step = 1e-10;
  int step_halvings = 30;
  Method method = Method::mle;
  int bootstrap_reps = 500;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // bootstrap refits; 0 = automatic

  // Throws InvalidData on non-positive tolerances or counts.
  void validate() const;
};

struct FitResult {
  Method method = Method::mle;
  ParamVector theta;
  Eigen::VectorXd std_errors;  // sqrt(diag(K^{-1})) at se_point
  std::string se_point;        // "estimate" or "mle"
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  // max |U| (mle) or max |U*| (firth) at the returned point; otherwise the
  // value for the underlying maximum likelihood fit.
  double max_abs_score = 0.0;
  std::optional<Eigen::VectorXd> bias_applied;
  // Log-likelihood at the start, then after each accepted scoring step of
  // the maximum likelihood iteration (start value plus accumulated changes).
  std::vector<double> loglik_trace;
};

// Least-squares warm start: beta from log y on X, nu from the
// method-of-moments precision mean(y)(1 + mean(y)) / var(y) on Z.
Eigen::VectorXd initial_estimate(const ModelSpec& spec);

// Fisher scoring with step halving on the log-likelihood.
// Throws NonConvergence, SingularInformation or EvaluationFailure.
FitResult fit_mle(const ModelSpec& spec, const FitOptions& opts);
FitResult fit_mle(const ModelSpec& spec, const FitOptions& opts,
                  const Eigen::VectorXd& start);

// Returns the vector subtracted from the score; Firth uses Xtilde' delta1.
using ScoreAdjustment =
    std::function<Eigen::VectorXd(const ModelSpec&, const Eigen::VectorXd&)>;

// Solves U(theta) - adjustment(theta) = 0 by modified Fisher scoring started
// at the maximum likelihood estimate, halving steps until ||U*|| does not
// increase.
FitResult fit_firth(const ModelSpec& spec, const FitOptions& opts);
FitResult fit_firth(const ModelSpec& spec, const FitOptions& opts,
                    const ScoreAdjustment& adjustment);

// The modified scoring iteration itself, from an explicit start.
FitResult fit_modified_score(const ModelSpec& spec, const FitOptions& opts,
                             const Eigen::VectorXd& start,
                             const ScoreAdjustment& adjustment);

// Xtilde' delta1, the Firth adjustment.
Eigen::VectorXd firth_adjustment(const ModelSpec& spec,
                                 const Eigen::VectorXd& theta);

// theta_hat - B(theta_hat); standard errors stay those of the MLE.
FitResult fit_cox_snell(const ModelSpec& spec, const FitOptions& opts);

// 2 theta_hat - mean_b(theta*_b) over opts.bootstrap_reps parametric
// resamples from BP(mu_hat_i, phi_hat_i).
FitResult fit_bootstrap(const ModelSpec& spec, const FitOptions& opts);

// Dispatches on opts.method.
FitResult fit(const ModelSpec& spec, const FitOptions& opts);

// 2 theta_hat - mean of the resampled estimates (summed in index order).
Eigen::VectorXd bootstrap_correction(
    const Eigen::VectorXd& theta_hat,
    const std::vector<Eigen::VectorXd>& resampled);

// Draws one response vector from BP(mu_i, phi_i) at theta.
Eigen::VectorXd simulate_response(const ModelSpec& spec,
                                  const Eigen::VectorXd& theta,
                                  RandomStream& rng);

}  // namespace bpreg
