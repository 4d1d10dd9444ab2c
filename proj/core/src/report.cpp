#include "bpreg/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "bpreg/errors.hpp"
#include "bpreg/random.hpp"

namespace bpreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using json = nlohmann::ordered_json;

namespace {

json to_json(const VectorXd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v(i)))
      arr.push_back(v(i));
    else
      arr.push_back(nullptr);
  }
  return arr;
}

std::string display_name(Method m) {
  switch (m) {
    case Method::mle:
      return "MLE";
    case Method::cox_snell:
      return "Cox-Snell";
    case Method::firth:
      return "Firth";
    case Method::bootstrap:
      return "p-boot";
  }
  return "?";
}

std::string display_name(Estimator e) {
  switch (e) {
    case Estimator::mle:
      return "MLE";
    case Estimator::cox_snell:
      return "Cox-Snell";
    case Estimator::firth:
      return "Firth";
    case Estimator::warp_boot:
      return "p-boot";
  }
  return "?";
}

std::string fixed4(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  // avoid "-0.0000"
  if (std::string(buf) == "-0.0000") return "0.0000";
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

bool FitReport::all_converged() const {
  for (const auto& m : methods)
    if (!m.fit || !m.fit->converged) return false;
  return true;
}

VectorXd relative_change(const VectorXd& mle, const VectorXd& corrected) {
  return ((mle - corrected).array() / corrected.array()).abs().matrix() * 100.0;
}

FitReport run_fit(const Dataset& data, const std::string& response,
                  const std::vector<std::string>& mean_terms,
                  const std::vector<std::string>& prec_terms,
                  const std::vector<Method>& methods, const FitOptions& opts) {
  if (methods.empty()) throw InvalidData("no estimation methods requested");
  const auto& yv = data.numeric(response);
  const Index n = static_cast<Index>(data.rows());
  const auto design = [&](const std::vector<std::string>& terms) {
    MatrixXd D(n, static_cast<Index>(terms.size()) + 1);
    D.col(0).setOnes();
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto& col = data.numeric(terms[k]);
      for (Index i = 0; i < n; ++i) D(i, Index(k) + 1) = col[i];
    }
    return D;
  };
  const VectorXd y = Eigen::Map<const VectorXd>(yv.data(), n);
  const ModelSpec spec(y, design(mean_terms), design(prec_terms));

  FitReport rep;
  rep.response = response;
  rep.mean_terms = mean_terms;
  rep.prec_terms = prec_terms;
  rep.parameter_names = parameter_names(spec.p(), spec.q());
  for (Index j = 0; j < spec.p(); ++j)
    rep.parameter_labels.push_back(
        j == 0 ? "beta0" : "beta" + std::to_string(j) + " (" +
                               mean_terms[j - 1] + ")");
  for (Index j = 0; j < spec.q(); ++j)
    rep.parameter_labels.push_back(
        j == 0 ? "nu0" : "nu" + std::to_string(j) + " (" +
                             prec_terms[j - 1] + ")");
  rep.n = data.rows();
  rep.seed = opts.seed;
  rep.bootstrap_reps = opts.bootstrap_reps;

  for (Method m : methods) {
    MethodOutcome out;
    out.method = m;
    FitOptions o = opts;
    o.method = m;
    try {
      out.fit = fit(spec, o);
    } catch (const Error& e) {
      out.error = e.what();
    }
    rep.methods.push_back(std::move(out));
  }

  // Relative changes need the MLE even when it was not requested.
  std::optional<VectorXd> mle;
  for (const auto& o : rep.methods)
    if (o.method == Method::mle && o.fit) mle = o.fit->theta.theta();
  if (!mle) {
    try {
      mle = fit_mle(spec, opts).theta.theta();
    } catch (const Error&) {
    }
  }
  if (mle) {
    for (const auto& o : rep.methods)
      if (o.fit)
        rep.relative_changes.emplace_back(
            o.method, relative_change(*mle, o.fit->theta.theta()));
  }
  return rep;
}

std::string format_fit_table(const FitReport& rep) {
  constexpr std::size_t kLabel = 22, kCol = 12;
  std::ostringstream os;
  os << "Beta prime regression: " << rep.response << " ~ mean(";
  for (std::size_t k = 0; k < rep.mean_terms.size(); ++k)
    os << (k ? ", " : "") << rep.mean_terms[k];
  os << ") | precision(";
  for (std::size_t k = 0; k < rep.prec_terms.size(); ++k)
    os << (k ? ", " : "") << rep.prec_terms[k];
  os << "), log links, n = " << rep.n << "\n\n";

  os << pad_right("Estimates", kLabel);
  for (const auto& m : rep.methods) os << pad_left(display_name(m.method), kCol);
  os << '\n';
  for (std::size_t j = 0; j < rep.parameter_labels.size(); ++j) {
    os << pad_right(rep.parameter_labels[j], kLabel);
    for (const auto& m : rep.methods)
      os << pad_left(m.fit ? fixed4(m.fit->theta.theta()(Index(j))) : "failed",
                     kCol);
    os << '\n' << pad_right("", kLabel);
    for (const auto& m : rep.methods)
      os << pad_left(
          m.fit ? "(" + fixed4(m.fit->std_errors(Index(j))) + ")" : "", kCol);
    os << '\n';
  }

  if (!rep.relative_changes.empty()) {
    os << "\nRelative change vs MLE (%)\n" << pad_right("Estimator", kLabel);
    for (const auto& name : rep.parameter_names)
      os << pad_left("RC(" + name + ")", kCol);
    os << '\n';
    for (const auto& [method, rc] : rep.relative_changes) {
      if (method == Method::mle) continue;
      os << pad_right(display_name(method), kLabel);
      for (Index j = 0; j < rc.size(); ++j) os << pad_left(fixed4(rc(j)), kCol);
      os << '\n';
    }
  }

  for (const auto& m : rep.methods) {
    if (!m.fit)
      os << "\n" << display_name(m.method) << " failed: " << m.error << '\n';
  }
  return os.str();
}

std::string fit_report_json(const FitReport& rep) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["model"] = {{"response", rep.response},
                  {"n", rep.n},
                  {"mean", rep.mean_terms},
                  {"prec", rep.prec_terms},
                  {"parameters", rep.parameter_names},
                  {"links", {{"mean", "log"}, {"precision", "log"}}}};
  json methods = json::object();
  for (const auto& m : rep.methods) {
    json entry;
    if (m.fit) {
      entry["estimates"] = to_json(m.fit->theta.theta());
      entry["std_errors"] = to_json(m.fit->std_errors);
      entry["converged"] = m.fit->converged;
      entry["iterations"] = m.fit->iterations;
      entry["loglik"] = std::isfinite(m.fit->loglik) ? json(m.fit->loglik)
                                                      : json(nullptr);
      entry["se_point"] = m.fit->se_point;
      if (m.fit->bias_applied)
        entry["bias_applied"] = to_json(*m.fit->bias_applied);
    } else {
      entry["estimates"] = nullptr;
      entry["std_errors"] = nullptr;
      entry["converged"] = false;
      entry["error"] = m.error;
    }
    methods[method_name(m.method)] = std::move(entry);
  }
  doc["methods"] = std::move(methods);
  json rc = json::object();
  for (const auto& [method, values] : rep.relative_changes)
    rc[method_name(method)] = to_json(values);
  doc["relative_changes"] = std::move(rc);
  doc["bootstrap_reps"] = rep.bootstrap_reps;
  doc["seed"] = rep.seed;
  return doc.dump(2) + "\n";
}

std::string format_simulation_table(const McReport& rep) {
  constexpr std::size_t kLabel = 12, kCol = 12;
  const McConfig& cfg = rep.config;
  std::ostringstream os;
  os << "Simulation: n = " << cfg.n << ", p = q = ";
  if (cfg.p == cfg.q)
    os << cfg.p;
  else
    os << cfg.p << "/" << cfg.q;
  os << ", m = " << cfg.m << " (" << rep.successes << " ok, " << rep.failures
     << " failed), seed = " << cfg.seed << "\n\n";
  os << pad_right("Estimates", kLabel);
  for (Estimator e : kEstimators) os << pad_left(display_name(e), kCol);
  os << '\n';
  for (std::size_t j = 0; j < rep.parameter_names.size(); ++j) {
    const Index k = Index(j);
    const auto row = [&](const std::string& label, auto&& pick) {
      os << pad_right(label, kLabel);
      for (Estimator e : kEstimators) os << pad_left(fixed4(pick(rep[e])), kCol);
      os << '\n';
    };
    row(rep.parameter_names[j], [&](const EstimatorSummary& s) { return s.mean(k); });
    row("Bias", [&](const EstimatorSummary& s) { return s.bias(k); });
    row("variance", [&](const EstimatorSummary& s) { return s.variance(k); });
    row("MSE", [&](const EstimatorSummary& s) { return s.mse(k); });
    os << '\n';
  }
  return os.str();
}

std::string simulation_report_json(const McReport& rep) {
  const McConfig& cfg = rep.config;
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["config"] = {{"n", cfg.n},
                   {"p", cfg.p},
                   {"q", cfg.q},
                   {"m", cfg.m},
                   {"true_theta", to_json(cfg.truth())},
                   {"rng", RandomStream::kAlgorithm}};
  doc["parameters"] = rep.parameter_names;
  json est = json::object();
  for (Estimator e : kEstimators) {
    const EstimatorSummary& s = rep[e];
    est[estimator_name(e)] = {{"mean", to_json(s.mean)},
                              {"bias", to_json(s.bias)},
                              {"variance", to_json(s.variance)},
                              {"mse", to_json(s.mse)}};
  }
  doc["estimators"] = std::move(est);
  doc["successes"] = rep.successes;
  doc["failures"] = rep.failures;
  doc["max_firth_abs_score"] = rep.max_firth_abs_score;
  doc["seed"] = cfg.seed;
  return doc.dump(2) + "\n";
}

}  // namespace bpreg
