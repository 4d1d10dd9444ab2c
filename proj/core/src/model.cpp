#include "bpreg/model.hpp"

#include <cmath>
#include <sstream>

#include "bpreg/errors.hpp"
#include "bpreg/special.hpp"

namespace bpreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

ModelSpec::ModelSpec(VectorXd y, MatrixXd X, MatrixXd Z, Link mean_link,
                     Link precision_link)
    : y_(std::move(y)),
      X_(std::move(X)),
      Z_(std::move(Z)),
      mean_link_(mean_link),
      precision_link_(precision_link) {
  const Index n = y_.size();
  if (X_.rows() != n || Z_.rows() != n) {
    std::ostringstream msg;
    msg << "design rows (X: " << X_.rows() << ", Z: " << Z_.rows()
        << ") do not match response length " << n;
    throw InvalidData(msg.str());
  }
  if (X_.cols() < 1 || Z_.cols() < 1)
    throw InvalidData("mean and precision designs need at least one column");
  if (!X_.allFinite() || !Z_.allFinite())
    throw InvalidData("design matrices contain non-finite entries");
  // q < n - p
  if (X_.cols() + Z_.cols() >= n) {
    std::ostringstream msg;
    msg << "need p + q < n, got p=" << X_.cols() << ", q=" << Z_.cols()
        << ", n=" << n;
    throw InvalidData(msg.str());
  }
  if (Eigen::ColPivHouseholderQR<MatrixXd>(X_).rank() != X_.cols())
    throw InvalidData("mean design X is not of full column rank");
  if (Eigen::ColPivHouseholderQR<MatrixXd>(Z_).rank() != Z_.cols())
    throw InvalidData("precision design Z is not of full column rank");
  validate_response();
  log_y_ = y_.array().log();
  log1p_y_ = y_.array().log1p();
}

ModelSpec::ModelSpec(Trusted, const ModelSpec& design, VectorXd y)
    : y_(std::move(y)),
      X_(design.X_),
      Z_(design.Z_),
      mean_link_(design.mean_link_),
      precision_link_(design.precision_link_) {
  if (y_.size() != X_.rows())
    throw InvalidData("response length does not match the design");
  validate_response();
  log_y_ = y_.array().log();
  log1p_y_ = y_.array().log1p();
}

ModelSpec ModelSpec::with_response(VectorXd y) const {
  return ModelSpec(Trusted{}, *this, std::move(y));
}

void ModelSpec::validate_response() const {
  for (Index i = 0; i < y_.size(); ++i) {
    if (!(y_(i) > 0.0) || !std::isfinite(y_(i))) {
      std::ostringstream msg;
      msg << "response must be positive and finite; y[" << i
          << "] = " << y_(i);
      throw InvalidData(msg.str());
    }
  }
}

VectorXd ParamVector::theta() const {
  VectorXd t(beta.size() + nu.size());
  t << beta, nu;
  return t;
}

ParamVector ParamVector::split(const VectorXd& theta, Index p) {
  return {theta.head(p), theta.tail(theta.size() - p)};
}

Predictors predictors(const ModelSpec& spec, const VectorXd& theta) {
  if (theta.size() != spec.dim())
    throw InvalidData("parameter vector length does not match p + q");
  const VectorXd eta1 = spec.X() * theta.head(spec.p());
  const VectorXd eta2 = spec.Z() * theta.tail(spec.q());
  const Index n = spec.n();
  const Link& g1 = spec.mean_link();
  const Link& g2 = spec.precision_link();
  Predictors pr{VectorXd(n), VectorXd(n), VectorXd(n),
                VectorXd(n), VectorXd(n), VectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    pr.mu(i) = g1.inverse(eta1(i));
    pr.dmu(i) = g1.d1(eta1(i));
    pr.d2mu(i) = g1.d2(eta1(i));
    pr.phi(i) = g2.inverse(eta2(i));
    pr.dphi(i) = g2.d1(eta2(i));
    pr.d2phi(i) = g2.d2(eta2(i));
    if (!(pr.mu(i) > 0.0) || !(pr.phi(i) > 0.0) || !std::isfinite(pr.mu(i)) ||
        !std::isfinite(pr.phi(i)) || !std::isfinite(pr.dmu(i)) ||
        !std::isfinite(pr.dphi(i))) {
      std::ostringstream msg;
      msg << "invalid fitted values at observation " << i << " (mu="
          << pr.mu(i) << ", phi=" << pr.phi(i) << ")";
      throw EvaluationFailure(msg.str());
    }
  }
  return pr;
}

double log_likelihood(const ModelSpec& spec, const VectorXd& theta) {
  const Predictors pr = predictors(spec, theta);
  double total = 0.0;
  for (Index i = 0; i < spec.n(); ++i) {
    const double mu = pr.mu(i);
    const double phi = pr.phi(i);
    const double alpha = mu * (1.0 + phi);
    total += (alpha - 1.0) * spec.log_y()(i) -
             (alpha + phi + 2.0) * spec.log1p_y()(i) - log_gamma(alpha) -
             log_gamma(phi + 2.0) + log_gamma(alpha + phi + 2.0);
  }
  if (!std::isfinite(total))
    throw EvaluationFailure("log-likelihood is not finite");
  return total;
}

namespace {

// log Gamma(a + h) - log Gamma(a)
double log_gamma_change(double a, double h) {
  if (std::abs(h) <= 1e-5 * a)
    return h * (digamma(a) + h / 2.0 * (trigamma(a) + h / 3.0 * tetragamma(a)));
  return log_gamma(a + h) - log_gamma(a);
}

}  // namespace

double log_likelihood_change(const ModelSpec& spec, const VectorXd& from,
                             const VectorXd& to) {
  const Predictors pr = predictors(spec, from);
  const VectorXd step = to - from;
  const VectorXd eta1 = spec.X() * from.head(spec.p());
  const VectorXd eta2 = spec.Z() * from.tail(spec.q());
  const VectorXd d1 = spec.X() * step.head(spec.p());
  const VectorXd d2 = spec.Z() * step.tail(spec.q());
  double total = 0.0;
  for (Index i = 0; i < spec.n(); ++i) {
    const double mu = pr.mu(i);
    const double phi = pr.phi(i);
    const double dmu = spec.mean_link().inverse_change(eta1(i), d1(i));
    const double dphi = spec.precision_link().inverse_change(eta2(i), d2(i));
    if (!(mu + dmu > 0.0) || !(phi + dphi > 0.0) ||
        !std::isfinite(mu + dmu) || !std::isfinite(phi + dphi))
      throw EvaluationFailure("invalid fitted values at the new point");
    const double alpha = mu * (1.0 + phi);
    const double d_alpha = dmu * (1.0 + phi + dphi) + mu * dphi;
    const double d_gamma = d_alpha + dphi;
    total += d_alpha * spec.log_y()(i) - d_gamma * spec.log1p_y()(i) -
             log_gamma_change(alpha, d_alpha) -
             log_gamma_change(phi + 2.0, dphi) +
             log_gamma_change(alpha + phi + 2.0, d_gamma);
  }
  if (!std::isfinite(total))
    throw EvaluationFailure("log-likelihood change is not finite");
  return total;
}

VectorXd score(const ModelSpec& spec, const VectorXd& theta) {
  const Predictors pr = predictors(spec, theta);
  const Index n = spec.n();
  VectorXd u_mu(n), u_phi(n);
  for (Index i = 0; i < n; ++i) {
    const double mu = pr.mu(i);
    const double phi = pr.phi(i);
    const double alpha = mu * (1.0 + phi);
    const double psi_a = digamma(alpha);
    const double psi_g = digamma(alpha + phi + 2.0);
    const double ly = spec.log_y()(i);
    const double l1y = spec.log1p_y()(i);
    const double s_mu = (1.0 + phi) * (ly - l1y - psi_a + psi_g);
    const double s_phi = mu * ly - (1.0 + mu) * l1y - mu * psi_a -
                         digamma(phi + 2.0) + (1.0 + mu) * psi_g;
    u_mu(i) = s_mu * pr.dmu(i);
    u_phi(i) = s_phi * pr.dphi(i);
  }
  VectorXd u(spec.dim());
  u << spec.X().transpose() * u_mu, spec.Z().transpose() * u_phi;
  if (!u.allFinite()) throw EvaluationFailure("score is not finite");
  return u;
}

InfoWeights information_weights(const Predictors& pr) {
  const Index n = pr.mu.size();
  InfoWeights w{VectorXd(n), VectorXd(n), VectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    const double mu = pr.mu(i);
    const double phi = pr.phi(i);
    const double alpha = mu * (1.0 + phi);
    const double tri_a = trigamma(alpha);
    const double tri_g = trigamma(alpha + phi + 2.0);
    const double a = tri_a - tri_g;
    const double b = mu * mu * tri_a - (1.0 + mu) * (1.0 + mu) * tri_g +
                     trigamma(phi + 2.0);
    w.w_bb(i) = (1.0 + phi) * (1.0 + phi) * a * pr.dmu(i) * pr.dmu(i);
    w.w_bn(i) = (1.0 + phi) * (a * mu - tri_g) * pr.dmu(i) * pr.dphi(i);
    w.w_nn(i) = b * pr.dphi(i) * pr.dphi(i);
  }
  return w;
}

MatrixXd assemble_information(const ModelSpec& spec, const InfoWeights& w) {
  const Index p = spec.p();
  const Index q = spec.q();
  const auto& X = spec.X();
  const auto& Z = spec.Z();
  MatrixXd K(p + q, p + q);
  K.topLeftCorner(p, p) = X.transpose() * w.w_bb.asDiagonal() * X;
  K.topRightCorner(p, q) = X.transpose() * w.w_bn.asDiagonal() * Z;
  K.bottomLeftCorner(q, p) = K.topRightCorner(p, q).transpose();
  K.bottomRightCorner(q, q) = Z.transpose() * w.w_nn.asDiagonal() * Z;
  return K;
}

InfoBlocks expected_information(const ModelSpec& spec, const VectorXd& theta) {
  const Predictors pr = predictors(spec, theta);
  InfoWeights w = information_weights(pr);
  const Index n = spec.n();
  const Index p = spec.p();
  const Index q = spec.q();

  InfoBlocks out;
  out.K = assemble_information(spec, w);
  out.Ktilde = MatrixXd::Zero(2 * n, 2 * n);
  out.Ktilde.topLeftCorner(n, n).diagonal() = w.w_bb;
  out.Ktilde.topRightCorner(n, n).diagonal() = w.w_bn;
  out.Ktilde.bottomLeftCorner(n, n).diagonal() = w.w_bn;
  out.Ktilde.bottomRightCorner(n, n).diagonal() = w.w_nn;
  out.Xtilde = MatrixXd::Zero(2 * n, p + q);
  out.Xtilde.topLeftCorner(n, p) = spec.X();
  out.Xtilde.bottomRightCorner(n, q) = spec.Z();
  out.w_bb = std::move(w.w_bb);
  out.w_bn = std::move(w.w_bn);
  out.w_nn = std::move(w.w_nn);

  invert_information(out.K);  // singularity check only
  return out;
}

InverseInformation invert_information(const MatrixXd& K) {
  if (!K.allFinite())
    throw SingularInformation("information matrix has non-finite entries");
  Eigen::LLT<MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw SingularInformation("information matrix is not positive definite");
  // Condition of the unit-diagonal rescaling, so parameter units do not count.
  const VectorXd d = K.diagonal().cwiseSqrt().cwiseInverse();
  const MatrixXd C = d.asDiagonal() * K * d.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double condition = lo > 0.0 ? hi / lo : INFINITY;
  if (!(condition <= kMaxInformationCondition)) {
    std::ostringstream msg;
    msg << "information matrix is numerically singular (condition number "
        << condition << ")";
    throw SingularInformation(msg.str());
  }
  MatrixXd inv = llt.solve(MatrixXd::Identity(K.rows(), K.cols()));
  // exact symmetry for downstream block extraction
  inv = 0.5 * (inv + inv.transpose()).eval();
  return {std::move(inv), condition};
}

}  // namespace bpreg
