#include "bpreg/simulate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "bpreg/bias.hpp"
#include "bpreg/errors.hpp"
#include "bpreg/parallel.hpp"
#include "bpreg/random.hpp"

namespace bpreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr int kMaxRedraws = 10;
}

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::mle:
      return "mle";
    case Estimator::cox_snell:
      return "cox_snell";
    case Estimator::firth:
      return "firth";
    case Estimator::warp_boot:
      return "warp_boot";
  }
  return "unknown";
}

VectorXd McConfig::truth() const {
  return true_theta ? *true_theta : VectorXd::Ones(dim());
}

void McConfig::validate() const {
  if (p < 0 || q < 0) throw InvalidData("p and q must be non-negative");
  if (n <= p + q + 2) throw InvalidData("need n > p + q + 2");
  if (m < 1) throw InvalidData("m must be at least 1");
  if (true_theta && true_theta->size() != dim())
    throw InvalidData("true_theta must have p + q + 2 entries");
  fit.validate();
}

McDesign make_design(const McConfig& cfg) {
  const int k = std::max(cfg.p, cfg.q);
  RandomStream rng = RandomStream(cfg.seed).derive(0);
  MatrixXd cov(cfg.n, k);
  for (int i = 0; i < cfg.n; ++i)
    for (int l = 0; l < k; ++l) cov(i, l) = rng.uniform();

  McDesign d{MatrixXd(cfg.n, cfg.p + 1), MatrixXd(cfg.n, cfg.q + 1)};
  d.X.col(0).setOnes();
  d.Z.col(0).setOnes();
  d.X.rightCols(cfg.p) = cov.leftCols(cfg.p);
  d.Z.rightCols(cfg.q) = cov.leftCols(cfg.q);
  return d;
}

std::vector<std::string> parameter_names(Index p, Index q) {
  std::vector<std::string> names;
  for (Index j = 0; j < p; ++j) names.push_back("beta" + std::to_string(j));
  for (Index j = 0; j < q; ++j) names.push_back("nu" + std::to_string(j));
  return names;
}

namespace {

ReplicateRecord run_replicate(const ModelSpec& design_spec,
                              const VectorXd& truth, const FitOptions& opts,
                              RandomStream rng, int replicate) {
  ReplicateRecord rec;
  rec.replicate = replicate;
  try {
    const ModelSpec spec =
        design_spec.with_response(simulate_response(design_spec, truth, rng));
    const FitResult mle = fit_mle(spec, opts);
    const VectorXd theta_hat = mle.theta.theta();

    const VectorXd bias = cox_snell_bias(spec, theta_hat).joint;
    const FitResult firth =
        fit_modified_score(spec, opts, theta_hat, firth_adjustment);

    // Warp-speed bootstrap: a single parametric resample at theta_hat.
    bool resampled = false;
    for (int attempt = 0; attempt <= kMaxRedraws && !resampled; ++attempt) {
      try {
        const ModelSpec star =
            spec.with_response(simulate_response(spec, theta_hat, rng));
        rec.boot_star = fit_mle(star, opts).theta.theta();
        resampled = true;
      } catch (const Error&) {
      }
    }
    if (!resampled) throw NonConvergence("warp-speed resample kept failing");

    rec.estimates[0] = theta_hat;
    rec.estimates[1] = theta_hat - bias;
    rec.estimates[2] = firth.theta.theta();
    rec.estimates[3] = 2.0 * theta_hat - rec.boot_star;
    rec.firth_max_abs_score = firth.max_abs_score;
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.failure = e.what();
  }
  return rec;
}

}  // namespace

EstimatorSummary summarize(const std::vector<ReplicateRecord>& records,
                           Estimator which, const VectorXd& truth) {
  const auto idx = static_cast<std::size_t>(which);
  const Index d = truth.size();
  VectorXd sum = VectorXd::Zero(d);
  double count = 0.0;
  for (const auto& r : records) {
    if (!r.ok) continue;
    sum += r.estimates[idx];
    count += 1.0;
  }
  EstimatorSummary s;
  if (count == 0.0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean = s.bias = s.variance = s.mse = VectorXd::Constant(d, nan);
    return s;
  }
  s.mean = sum / count;
  s.bias = s.mean - truth;
  VectorXd ss = VectorXd::Zero(d);
  VectorXd se = VectorXd::Zero(d);
  for (const auto& r : records) {
    if (!r.ok) continue;
    ss += (r.estimates[idx] - s.mean).array().square().matrix();
    se += (r.estimates[idx] - truth).array().square().matrix();
  }
  s.variance = ss / count;
  s.mse = se / count;
  return s;
}

McReport run_study(const McConfig& cfg) {
  cfg.validate();
  McReport report;
  report.config = cfg;
  report.design = make_design(cfg);
  report.parameter_names = parameter_names(cfg.p + 1, cfg.q + 1);

  const VectorXd truth = cfg.truth();
  // Placeholder response; every replicate swaps in its own draw.
  const ModelSpec design_spec(VectorXd::Ones(cfg.n), report.design.X,
                              report.design.Z);
  const RandomStream root(cfg.seed);

  report.replicates.resize(static_cast<std::size_t>(cfg.m));
  parallel_for(report.replicates.size(), cfg.threads, [&](std::size_t r) {
    const int replicate = static_cast<int>(r) + 1;
    report.replicates[r] = run_replicate(design_spec, truth, cfg.fit,
                                         root.derive(replicate), replicate);
  });

  for (const auto& rec : report.replicates) {
    if (rec.ok) {
      ++report.successes;
      report.max_firth_abs_score =
          std::max(report.max_firth_abs_score, rec.firth_max_abs_score);
    } else {
      ++report.failures;
    }
  }
  if (report.failures > cfg.max_failure_fraction * cfg.m) {
    std::ostringstream msg;
    msg << "simulation aborted: " << report.failures << " of " << cfg.m
        << " replicates failed";
    for (const auto& rec : report.replicates) {
      if (!rec.ok) {
        msg << " (first failure, replicate " << rec.replicate << ": "
            << rec.failure << ")";
        break;
      }
    }
    throw Error(msg.str());
  }
  for (Estimator e : kEstimators)
    report.summary[static_cast<std::size_t>(e)] =
        summarize(report.replicates, e, truth);
  return report;
}

void write_replicates_csv(const McReport& report, std::ostream& out) {
  const Index d = report.config.dim();
  out << "replicate,estimator";
  for (Index j = 1; j <= d; ++j) out << ",theta_" << j;
  out << '\n';
  out << std::setprecision(17);
  for (const auto& rec : report.replicates) {
    if (!rec.ok) continue;
    for (Estimator e : kEstimators) {
      out << rec.replicate << ',' << estimator_name(e);
      const VectorXd& est = rec.estimates[static_cast<std::size_t>(e)];
      for (Index j = 0; j < d; ++j) out << ',' << est(j);
      out << '\n';
    }
  }
}

void write_replicates_csv(const McReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_replicates_csv(report, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

McReport export_replicates(const McConfig& cfg, const std::string& path) {
  McReport report = run_study(cfg);
  write_replicates_csv(report, path);
  return report;
}

}  // namespace bpreg
