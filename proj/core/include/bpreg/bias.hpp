#pragma once

#include <Eigen/Dense>

#include "bpreg/model.hpp"

namespace bpreg {

// Per-observation polygamma combinations, alpha_i = mu_i (1 + phi_i) and
// gamma_i = alpha_i + phi_i + 2:
//   a = psi1(alpha) - psi1(gamma)
//   b = mu^2 psi1(alpha) - (1+mu)^2 psi1(gamma) + psi1(phi+2)
//   c = psi2(alpha) - psi2(gamma)
//   d = (1+mu)^2 psi2(gamma) - mu^2 psi2(alpha)
//   e = (1+mu)^3 psi2(gamma) - mu^3 psi2(alpha) - psi2(phi+2)
struct CumulantScalars {
  Eigen::VectorXd a, b, c, d, e;
  Eigen::VectorXd tri_gamma;    // psi1(gamma_i)
  Eigen::VectorXd tetra_gamma;  // psi2(gamma_i)
};

CumulantScalars cumulant_scalars(const Eigen::VectorXd& mu,
                                 const Eigen::VectorXd& phi);

// Observation weights of the joint cumulants of log-likelihood derivatives.
// Each cumulant over parameter indices is a sum over observations of the
// weight times the matching design entries: b = mean (x_i), n = precision
// (z_i). E.g. kappa_{rsU} = sum_i bbn_i x_ir x_is z_iU, and the derivative
// kappa_{rS}^{(u)} = sum_i bn_b_i x_ir z_iS x_iu.
struct CumulantWeights {
  // E[U_rs], E[U_rS], E[U_RS]
  Eigen::VectorXd bb, bn, nn;
  // E[U_rsu], E[U_rsU], E[U_rSU], E[U_RSU]
  Eigen::VectorXd bbb, bbn, bnn, nnn;
  // derivatives of the second-order cumulants
  Eigen::VectorXd bb_b, bb_n, bn_b, bn_n, nn_b, nn_n;
};

CumulantWeights cumulant_weights(const Predictors& pred,
                                 const CumulantScalars& cum);

// Diagonals of M1..M6: the "derivative minus half third cumulant"
// contractions, e.g. kappa_rs^(u) - kappa_rsu / 2 = sum_i m1_i x_ir x_is x_iu.
struct MDiagonals {
  Eigen::VectorXd m1, m2, m3, m4, m5, m6;
};

MDiagonals m_matrices(const Predictors& pred, const CumulantScalars& cum);
MDiagonals m_matrices(const ModelSpec& spec, const Eigen::VectorXd& theta);

struct BiasWorkspace {
  Predictors pred;
  CumulantScalars cumulants;
  MDiagonals M;
  Eigen::MatrixXd K;
  Eigen::MatrixXd Kinv;
  Eigen::MatrixXd Kinv_bb;  // p x p
  Eigen::MatrixXd Kinv_bn;  // p x q
  Eigen::MatrixXd Kinv_nn;  // q x q
  Eigen::VectorXd P_bb;     // diag(X Kinv_bb X')
  Eigen::VectorXd P_bn;     // diag(X Kinv_bn Z')
  Eigen::VectorXd P_nn;     // diag(Z Kinv_nn Z')
  Eigen::VectorXd delta1;   // 2n
};

// Throws SingularInformation when K(theta) cannot be inverted.
BiasWorkspace bias_workspace(const ModelSpec& spec,
                             const Eigen::VectorXd& theta);

// Xtilde' delta1 = (X' delta1_top, Z' delta1_bottom), equal to K(theta) B(theta).
Eigen::VectorXd bias_score_term(const ModelSpec& spec,
                                const BiasWorkspace& ws);

struct BiasResult {
  Eigen::VectorXd bias_beta;  // block form for beta
  Eigen::VectorXd bias_nu;    // block form for nu
  Eigen::VectorXd joint;      // (Xtilde' Ktilde Xtilde)^{-1} Xtilde' delta1
};

// Second-order (O(1/n)) bias of the maximum likelihood estimator at theta.
BiasResult cox_snell_bias(const ModelSpec& spec, const Eigen::VectorXd& theta);

// theta_hat - B(theta_hat).
ParamVector corrected_estimate(const ParamVector& theta_hat,
                               const ModelSpec& spec);

// U*(theta) = U(theta) - Xtilde' delta1.
Eigen::VectorXd modified_score(const ModelSpec& spec,
                               const Eigen::VectorXd& theta);

}  // namespace bpreg
