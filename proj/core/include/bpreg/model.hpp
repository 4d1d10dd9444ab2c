#pragma once

#include <Eigen/Dense>

#include "bpreg/link.hpp"

namespace bpreg {

// Beta prime regression with mean submodel g1(mu_i) = x_i' beta and precision
// submodel g2(phi_i) = z_i' nu. Immutable once constructed.
class ModelSpec {
 public:
  // Throws InvalidData when a response is not strictly positive, when the
  // designs do not have full column rank, or when p + q >= n.
  ModelSpec(Eigen::VectorXd y, Eigen::MatrixXd X, Eigen::MatrixXd Z,
            Link mean_link = Link::log(), Link precision_link = Link::log());

  // Same designs and links, new response.
  ModelSpec with_response(Eigen::VectorXd y) const;

  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::VectorXd& log_y() const { return log_y_; }
  const Eigen::VectorXd& log1p_y() const { return log1p_y_; }
  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::MatrixXd& Z() const { return Z_; }
  const Link& mean_link() const { return mean_link_; }
  const Link& precision_link() const { return precision_link_; }

  Eigen::Index n() const { return y_.size(); }
  Eigen::Index p() const { return X_.cols(); }
  Eigen::Index q() const { return Z_.cols(); }
  Eigen::Index dim() const { return X_.cols() + Z_.cols(); }

 private:
  struct Trusted {};
  ModelSpec(Trusted, const ModelSpec& design, Eigen::VectorXd y);
  void validate_response() const;

  Eigen::VectorXd y_;
  Eigen::VectorXd log_y_;
  Eigen::VectorXd log1p_y_;
  Eigen::MatrixXd X_;
  Eigen::MatrixXd Z_;
  Link mean_link_;
  Link precision_link_;
};

// theta = (beta', nu')'.
struct ParamVector {
  Eigen::VectorXd beta;
  Eigen::VectorXd nu;

  Eigen::VectorXd theta() const;
  static ParamVector split(const Eigen::VectorXd& theta, Eigen::Index p);
};

// Per-observation means, precisions and inverse-link derivatives at theta.
struct Predictors {
  Eigen::VectorXd mu;
  Eigen::VectorXd phi;
  Eigen::VectorXd dmu;   // d mu / d eta1
  Eigen::VectorXd d2mu;  // d^2 mu / d eta1^2
  Eigen::VectorXd dphi;  // d phi / d eta2
  Eigen::VectorXd d2phi;
};

// Throws EvaluationFailure when any mu_i or phi_i is not positive and finite.
Predictors predictors(const ModelSpec& spec, const Eigen::VectorXd& theta);

double log_likelihood(const ModelSpec& spec, const Eigen::VectorXd& theta);

// log_likelihood(to) - log_likelihood(from), evaluated term by term from the
// parameter increments so that it stays accurate when the points are close.
double log_likelihood_change(const ModelSpec& spec, const Eigen::VectorXd& from,
                             const Eigen::VectorXd& to);

// Analytic gradient (U_beta', U_nu')' of the log-likelihood.
Eigen::VectorXd score(const ModelSpec& spec, const Eigen::VectorXd& theta);

// Expected Fisher information in diagonal-weight, assembled and stacked
// forms: K = [X'W_bb X, X'W_bn Z; Z'W_bn X, Z'W_nn Z] = Xtilde' Ktilde Xtilde.
struct InfoBlocks {
  Eigen::VectorXd w_bb;
  Eigen::VectorXd w_bn;
  Eigen::VectorXd w_nn;
  Eigen::MatrixXd K;       // (p+q) x (p+q)
  Eigen::MatrixXd Ktilde;  // 2n x 2n
  Eigen::MatrixXd Xtilde;  // 2n x (p+q), block diag(X, Z)
};

struct InfoWeights {
  Eigen::VectorXd w_bb;
  Eigen::VectorXd w_bn;
  Eigen::VectorXd w_nn;
};

InfoWeights information_weights(const Predictors& pred);

// K from weights, without building the stacked 2n-dimensional forms.
Eigen::MatrixXd assemble_information(const ModelSpec& spec,
                                     const InfoWeights& w);

// Throws SingularInformation when K is not numerically positive definite.
InfoBlocks expected_information(const ModelSpec& spec,
                                const Eigen::VectorXd& theta);

// Largest condition number of the unit-diagonal rescaled K accepted before
// K counts as singular.
inline constexpr double kMaxInformationCondition = 1e12;

struct InverseInformation {
  Eigen::MatrixXd inverse;
  double condition;
};

// Cholesky inverse of K. Throws SingularInformation when the factorization
// fails or the condition number exceeds kMaxInformationCondition.
InverseInformation invert_information(const Eigen::MatrixXd& K);

}  // namespace bpreg
