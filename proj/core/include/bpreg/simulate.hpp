#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bpreg/fit.hpp"

namespace bpreg {

enum class Estimator { mle = 0, cox_snell = 1, firth = 2, warp_boot = 3 };
inline constexpr std::size_t kEstimatorCount = 4;
inline constexpr std::array<Estimator, kEstimatorCount> kEstimators = {
    Estimator::mle, Estimator::cox_snell, Estimator::firth,
    Estimator::warp_boot};

std::string estimator_name(Estimator e);

// Monte Carlo study of the log-log beta prime regression
//   log mu_i  = beta_0 + sum_{l<=p} beta_l x_il
//   log phi_i = nu_0   + sum_{l<=q} nu_l  x_il
// with x_il ~ U(0,1) drawn once and shared by both predictors.
struct McConfig {
  int n = 30;
  int p = 1;  // mean slopes (intercept always included)
  int q = 1;  // precision slopes
  int m = 2000;
  std::uint64_t seed = 42;
  std::optional<Eigen::VectorXd> true_theta;  // default: all ones
  unsigned threads = 1;                       // 0 = automatic
  FitOptions fit;
  double max_failure_fraction = 0.01;

  Eigen::Index dim() const { return p + q + 2; }
  Eigen::VectorXd truth() const;
  void validate() const;
};

struct McDesign {
  Eigen::MatrixXd X;  // n x (p+1)
  Eigen::MatrixXd Z;  // n x (q+1)
};

// Covariates are drawn from the stream derive(0) of the study seed.
McDesign make_design(const McConfig& cfg);

struct ReplicateRecord {
  int replicate = 0;  // 1-based
  bool ok = false;
  std::string failure;
  std::array<Eigen::VectorXd, kEstimatorCount> estimates;
  Eigen::VectorXd boot_star;  // MLE on the single parametric resample
  double firth_max_abs_score = 0.0;
};

// Population moments over the successful replicates.
struct EstimatorSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd bias;      // mean - truth
  Eigen::VectorXd variance;  // divisor = number of successes
  Eigen::VectorXd mse;       // mean squared deviation from truth
};

struct McReport {
  McConfig config;
  McDesign design;
  std::vector<std::string> parameter_names;
  std::array<EstimatorSummary, kEstimatorCount> summary;
  int successes = 0;
  int failures = 0;
  double max_firth_abs_score = 0.0;
  std::vector<ReplicateRecord> replicates;

  const EstimatorSummary& operator[](Estimator e) const {
    return summary[static_cast<std::size_t>(e)];
  }
};

// Runs the study. Replicate r uses stream derive(r) of the study seed for
// both its response draw and its warp-speed resample, so the report does not
// depend on the thread count. Throws Error when failed replicates exceed
// max_failure_fraction of m.
McReport run_study(const McConfig& cfg);

// Moments of the given replicate estimates (ok records only).
EstimatorSummary summarize(const std::vector<ReplicateRecord>& records,
                           Estimator which, const Eigen::VectorXd& truth);

// CSV: replicate,estimator,theta_1..theta_{p+q}; one row per successful
// replicate and estimator.
void write_replicates_csv(const McReport& report, std::ostream& out);
void write_replicates_csv(const McReport& report, const std::string& path);

// run_study followed by write_replicates_csv.
McReport export_replicates(const McConfig& cfg, const std::string& path);

// beta0..beta{p-1}, nu0..nu{q-1} for p, q design columns.
std::vector<std::string> parameter_names(Eigen::Index p, Eigen::Index q);

}  // namespace bpreg
