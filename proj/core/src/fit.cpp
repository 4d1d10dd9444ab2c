#include "bpreg/fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bpreg/bias.hpp"
#include "bpreg/bpdist.hpp"
#include "bpreg/errors.hpp"
#include "bpreg/parallel.hpp"
#include "bpreg/random.hpp"

namespace bpreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string method_name(Method m) {
  switch (m) {
    case Method::mle:
      return "mle";
    case Method::cox_snell:
      return "cox_snell";
    case Method::firth:
      return "firth";
    case Method::bootstrap:
      return "boot";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "mle") return Method::mle;
  if (name == "cox_snell" || name == "coxsnell") return Method::cox_snell;
  if (name == "firth") return Method::firth;
  if (name == "boot" || name == "bootstrap") return Method::bootstrap;
  throw InvalidData("unknown estimation method '" + std::string(name) + "'");
}

void FitOptions::validate() const {
  if (max_iter < 1) throw InvalidData("max_iter must be at least 1");
  if (!(tol_score > 0.0) || !(tol_step > 0.0))
    throw InvalidData("tolerances must be positive");
  if (step_halvings < 0) throw InvalidData("step_halvings must be >= 0");
  if (bootstrap_reps < 1) throw InvalidData("bootstrap_reps must be >= 1");
}

namespace {

double max_abs(const VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

double relative_change(const VectorXd& next, const VectorXd& prev) {
  return (next - prev).cwiseAbs().maxCoeff() /
         (1.0 + prev.cwiseAbs().maxCoeff());
}

VectorXd standard_errors(const MatrixXd& K) {
  return invert_information(K).inverse.diagonal().cwiseSqrt();
}

MatrixXd information_at(const ModelSpec& spec, const VectorXd& theta) {
  return assemble_information(spec, information_weights(predictors(spec, theta)));
}

VectorXd scoring_step(const MatrixXd& K, const VectorXd& direction) {
  // Cholesky guard also rejects badly conditioned K.
  return invert_information(K).inverse * direction;
}

// Scoring iterations before slow progress switches to Newton steps.
constexpr int kScoringOnly = 25;

// Central-difference Jacobian of an analytic vector field.
template <class F>
MatrixXd jacobian(const F& f, const VectorXd& theta) {
  const Index d = theta.size();
  MatrixXd J(d, d);
  for (Index j = 0; j < d; ++j) {
    const double h = 1e-5 * (1.0 + std::abs(theta(j)));
    VectorXd up = theta, down = theta;
    up(j) += h;
    down(j) -= h;
    J.col(j) = (f(up) - f(down)) / (2.0 * h);
  }
  return J;
}

// Newton step for the root of f, or an empty vector when unusable.
VectorXd newton_step(const MatrixXd& J, const VectorXd& f) {
  Eigen::FullPivLU<MatrixXd> lu(J);
  if (!lu.isInvertible()) return {};
  VectorXd step = -lu.solve(f);
  if (!step.allFinite()) return {};
  return step;
}

double safe_loglik(const ModelSpec& spec, const VectorXd& theta) {
  try {
    return log_likelihood(spec, theta);
  } catch (const Error&) {
    return NAN;
  }
}

}  // namespace

VectorXd initial_estimate(const ModelSpec& spec) {
  const VectorXd& y = spec.y();
  const Index n = spec.n();
  VectorXd gy(n);
  for (Index i = 0; i < n; ++i)
    gy(i) = spec.mean_link().eval(std::max(y(i), 1e-10));
  const VectorXd beta = spec.X().colPivHouseholderQr().solve(gy);

  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / double(n - 1);
  double phi0 = mean * (1.0 + mean) / var;
  if (!std::isfinite(phi0) || !(phi0 > 0.0)) phi0 = 1.0;
  const VectorXd target =
      VectorXd::Constant(n, spec.precision_link().eval(phi0));
  const VectorXd nu = spec.Z().colPivHouseholderQr().solve(target);

  VectorXd theta(spec.dim());
  theta << beta, nu;
  return theta;
}

FitResult fit_mle(const ModelSpec& spec, const FitOptions& opts) {
  return fit_mle(spec, opts, initial_estimate(spec));
}

FitResult fit_mle(const ModelSpec& spec, const FitOptions& opts,
                  const VectorXd& start) {
  opts.validate();
  VectorXd theta = start;
  double ll = log_likelihood(spec, theta);
  VectorXd u = score(spec, theta);
  bool converged = false;
  int iter = 0;
  std::vector<double> trace{ll};

  while (iter < opts.max_iter) {
    if (max_abs(u) < opts.tol_score * (1.0 + std::abs(ll))) {
      converged = true;
      break;
    }
    ++iter;
    VectorXd step;
    if (iter > kScoringOnly) {
      try {
        MatrixXd H = jacobian([&](const VectorXd& t) { return score(spec, t); },
                              theta);
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::LLT<MatrixXd> llt(-H);
        if (llt.info() == Eigen::Success) step = llt.solve(u);
      } catch (const Error&) {
      }
    }
    if (step.size() == 0 || !step.allFinite())
      step = scoring_step(information_at(spec, theta), u);

    // Ascent is judged on the directly computed change, which stays
    // resolvable long after the two log-likelihood values agree to rounding.
    double lambda = 1.0;
    bool accepted = false;
    VectorXd next;
    double gain = 0.0;
    for (int h = 0; h <= opts.step_halvings; ++h, lambda *= 0.5) {
      next = theta + lambda * step;
      try {
        gain = log_likelihood_change(spec, theta, next);
      } catch (const Error&) {
        continue;
      }
      if (gain >= 0.0) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no ascent left; judged by the score below

    const double rel = relative_change(next, theta);
    theta = next;
    ll += gain;
    trace.push_back(ll);
    u = score(spec, theta);
    if (lambda == 1.0 && rel < opts.tol_step) {
      converged = true;
      break;
    }
  }
  if (!converged && max_abs(u) < opts.tol_score * (1.0 + std::abs(ll)))
    converged = true;
  if (!converged) {
    std::ostringstream msg;
    msg << "Fisher scoring did not converge after " << iter
        << " iterations (max |U| = " << max_abs(u) << ")";
    throw NonConvergence(msg.str());
  }

  FitResult r;
  r.method = Method::mle;
  r.theta = ParamVector::split(theta, spec.p());
  r.std_errors = standard_errors(information_at(spec, theta));
  r.se_point = "estimate";
  r.loglik = log_likelihood(spec, theta);
  r.iterations = iter;
  r.converged = true;
  r.max_abs_score = max_abs(u);
  r.loglik_trace = std::move(trace);
  return r;
}

VectorXd firth_adjustment(const ModelSpec& spec, const VectorXd& theta) {
  return bias_score_term(spec, bias_workspace(spec, theta));
}

FitResult fit_firth(const ModelSpec& spec, const FitOptions& opts) {
  return fit_firth(spec, opts, firth_adjustment);
}

FitResult fit_firth(const ModelSpec& spec, const FitOptions& opts,
                    const ScoreAdjustment& adjustment) {
  VectorXd start;
  try {
    start = fit_mle(spec, opts).theta.theta();
  } catch (const Error&) {
    start = initial_estimate(spec);
  }
  return fit_modified_score(spec, opts, start, adjustment);
}

FitResult fit_modified_score(const ModelSpec& spec, const FitOptions& opts,
                             const VectorXd& start,
                             const ScoreAdjustment& adjustment) {
  opts.validate();
  VectorXd theta = start;

  const auto modified = [&](const VectorXd& t) -> VectorXd {
    return score(spec, t) - adjustment(spec, t);
  };
  VectorXd ustar = modified(theta);
  bool converged = false;
  int iter = 0;

  while (iter < opts.max_iter) {
    if (max_abs(ustar) < opts.tol_score) {
      converged = true;
      break;
    }
    ++iter;
    MatrixXd metric = invert_information(information_at(spec, theta)).inverse;
    VectorXd step = metric * ustar;
    if (iter > kScoringOnly) {
      VectorXd newton;
      try {
        newton = newton_step(jacobian(modified, theta), ustar);
      } catch (const Error&) {
      }
      if (newton.size() != 0) {
        step = newton;
        metric = MatrixXd::Identity(theta.size(), theta.size());
      }
    }
    // ||U*|| in the K^{-1} metric of the current iterate, in which the scoring
    // direction descends near the solution; Newton steps use the plain norm.
    const double norm = ustar.dot(metric * ustar);

    double lambda = 1.0;
    bool accepted = false;
    VectorXd next, ustar_next;
    for (int h = 0; h <= opts.step_halvings; ++h, lambda *= 0.5) {
      next = theta + lambda * step;
      try {
        ustar_next = modified(next);
      } catch (const Error&) {
        continue;
      }
      if (ustar_next.allFinite() && ustar_next.dot(metric * ustar_next) <= norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No halving reduces the norm: take the plain modified scoring step.
      next = theta + step;
      ustar_next = modified(next);
    }

    theta = next;
    ustar = ustar_next;
  }
  if (!converged && max_abs(ustar) < opts.tol_score) converged = true;
  if (!converged) {
    std::ostringstream msg;
    msg << "modified Fisher scoring did not converge after " << iter
        << " iterations (max |U*| = " << max_abs(ustar) << ")";
    throw NonConvergence(msg.str());
  }

  FitResult r;
  r.method = Method::firth;
  r.theta = ParamVector::split(theta, spec.p());
  r.std_errors = standard_errors(information_at(spec, theta));
  r.se_point = "estimate";
  r.loglik = safe_loglik(spec, theta);
  r.iterations = iter;
  r.converged = true;
  r.max_abs_score = max_abs(ustar);
  return r;
}

FitResult fit_cox_snell(const ModelSpec& spec, const FitOptions& opts) {
  FitResult mle = fit_mle(spec, opts);
  const VectorXd theta_hat = mle.theta.theta();
  const VectorXd bias = cox_snell_bias(spec, theta_hat).joint;

  FitResult r = mle;
  r.method = Method::cox_snell;
  r.theta = ParamVector::split(theta_hat - bias, spec.p());
  r.se_point = "mle";
  r.loglik = safe_loglik(spec, r.theta.theta());
  r.bias_applied = bias;
  return r;
}

VectorXd simulate_response(const ModelSpec& spec, const VectorXd& theta,
                           RandomStream& rng) {
  const Predictors pr = predictors(spec, theta);
  VectorXd y(spec.n());
  for (Index i = 0; i < spec.n(); ++i)
    y(i) = draw(BpParams{pr.mu(i), pr.phi(i)}, rng);
  return y;
}

VectorXd bootstrap_correction(const VectorXd& theta_hat,
                              const std::vector<VectorXd>& resampled) {
  if (resampled.empty())
    throw InvalidData("bootstrap correction needs at least one resample");
  VectorXd sum = VectorXd::Zero(theta_hat.size());
  for (const auto& t : resampled) sum += t;
  return 2.0 * theta_hat - sum / double(resampled.size());
}

namespace {
constexpr int kMaxRedraws = 10;
}

FitResult fit_bootstrap(const ModelSpec& spec, const FitOptions& opts) {
  opts.validate();
  const FitResult mle = fit_mle(spec, opts);
  const VectorXd theta_hat = mle.theta.theta();
  const RandomStream root(opts.seed);

  FitOptions inner = opts;
  inner.method = Method::mle;
  std::vector<VectorXd> resampled(static_cast<std::size_t>(opts.bootstrap_reps));
  parallel_for(resampled.size(), opts.threads, [&](std::size_t b) {
    RandomStream rng = root.derive(b);
    for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
      try {
        const ModelSpec star =
            spec.with_response(simulate_response(spec, theta_hat, rng));
        resampled[b] = fit_mle(star, inner).theta.theta();
        return;
      } catch (const Error&) {
      }
    }
    std::ostringstream msg;
    msg << "bootstrap resample " << b << " failed after " << kMaxRedraws
        << " redraws";
    throw NonConvergence(msg.str());
  });

  const VectorXd corrected = bootstrap_correction(theta_hat, resampled);
  FitResult r = mle;
  r.method = Method::bootstrap;
  r.theta = ParamVector::split(corrected, spec.p());
  r.std_errors = standard_errors(information_at(spec, corrected));
  r.se_point = "estimate";
  r.loglik = safe_loglik(spec, corrected);
  return r;
}

FitResult fit(const ModelSpec& spec, const FitOptions& opts) {
  switch (opts.method) {
    case Method::mle:
      return fit_mle(spec, opts);
    case Method::cox_snell:
      return fit_cox_snell(spec, opts);
    case Method::firth:
      return fit_firth(spec, opts);
    case Method::bootstrap:
      return fit_bootstrap(spec, opts);
  }
  throw InvalidData("unknown estimation method");
}

}  // namespace bpreg
