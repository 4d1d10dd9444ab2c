#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bpreg/dataset.hpp"
#include "bpreg/fit.hpp"
#include "bpreg/simulate.hpp"

namespace bpreg {

// Bumped whenever a JSON field is renamed or removed.
inline constexpr int kReportSchemaVersion = 1;

struct MethodOutcome {
  Method method = Method::mle;
  std::optional<FitResult> fit;
  std::string error;  // set when fit is empty
};

struct FitReport {
  std::string response;
  std::vector<std::string> mean_terms;
  std::vector<std::string> prec_terms;
  std::vector<std::string> parameter_names;
  std::vector<std::string> parameter_labels;  // "beta1 (wet)", ...
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int bootstrap_reps = 0;
  std::vector<MethodOutcome> methods;
  // RC rows against the MLE, one per successfully fitted method.
  std::vector<std::pair<Method, Eigen::VectorXd>> relative_changes;

  bool all_converged() const;
};

// |(theta_mle - theta_o) / theta_o| * 100, elementwise.
Eigen::VectorXd relative_change(const Eigen::VectorXd& mle,
                                const Eigen::VectorXd& corrected);

// Builds X = [1 | mean_terms], Z = [1 | prec_terms] and fits every method.
// A failing method is recorded in its outcome; other methods still run.
// Throws for missing or non-numeric columns and invalid designs.
FitReport run_fit(const Dataset& data, const std::string& response,
                  const std::vector<std::string>& mean_terms,
                  const std::vector<std::string>& prec_terms,
                  const std::vector<Method>& methods, const FitOptions& opts);

// Estimates with standard errors in parentheses beneath, then the
// relative-change table; 4 decimals.
std::string format_fit_table(const FitReport& report);
std::string fit_report_json(const FitReport& report);

// Mean / bias / variance / MSE block per parameter, one column per estimator.
std::string format_simulation_table(const McReport& report);
std::string simulation_report_json(const McReport& report);

}  // namespace bpreg
