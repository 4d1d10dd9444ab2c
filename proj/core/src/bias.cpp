#include "bpreg/bias.hpp"

#include "bpreg/special.hpp"

namespace bpreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

CumulantScalars cumulant_scalars(const VectorXd& mu, const VectorXd& phi) {
  const Index n = mu.size();
  CumulantScalars s{VectorXd(n), VectorXd(n), VectorXd(n), VectorXd(n),
                    VectorXd(n), VectorXd(n), VectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    const double m = mu(i);
    const double alpha = m * (1.0 + phi(i));
    const double gamma = alpha + phi(i) + 2.0;
    const double t1a = trigamma(alpha);
    const double t1g = trigamma(gamma);
    const double t2a = tetragamma(alpha);
    const double t2g = tetragamma(gamma);
    const double m1 = 1.0 + m;
    s.a(i) = t1a - t1g;
    s.b(i) = m * m * t1a - m1 * m1 * t1g + trigamma(phi(i) + 2.0);
    s.c(i) = t2a - t2g;
    s.d(i) = m1 * m1 * t2g - m * m * t2a;
    s.e(i) = m1 * m1 * m1 * t2g - m * m * m * t2a - tetragamma(phi(i) + 2.0);
    s.tri_gamma(i) = t1g;
    s.tetra_gamma(i) = t2g;
  }
  return s;
}

CumulantWeights cumulant_weights(const Predictors& pr,
                                 const CumulantScalars& s) {
  const Index n = pr.mu.size();
  CumulantWeights w;
  for (auto* v : {&w.bb, &w.bn, &w.nn, &w.bbb, &w.bbn, &w.bnn, &w.nnn,
                  &w.bb_b, &w.bb_n, &w.bn_b, &w.bn_n, &w.nn_b, &w.nn_n})
    v->resize(n);

  for (Index i = 0; i < n; ++i) {
    const double mu = pr.mu(i);
    const double f = 1.0 + pr.phi(i);
    const double m1 = pr.dmu(i), m2 = pr.d2mu(i);
    const double p1 = pr.dphi(i), p2 = pr.d2phi(i);
    const double a = s.a(i), b = s.b(i), c = s.c(i), d = s.d(i), e = s.e(i);
    const double t1g = s.tri_gamma(i), t2g = s.tetra_gamma(i);
    const double t = t1g - a * mu;

    w.bb(i) = -f * f * a * m1 * m1;
    w.bn(i) = -f * (a * mu - t1g) * m1 * p1;
    w.nn(i) = -b * p1 * p1;

    w.bbb(i) = -f * f * (f * c * m1 * m1 * m1 + 3.0 * a * m1 * m2);
    w.bbn(i) = -f * (2.0 * a + f * c * mu - f * t2g) * m1 * m1 * p1 +
               f * t * m2 * p1;
    w.bnn(i) = t * (f * m1 * p2 + 2.0 * p1 * p1 * m1) + f * d * m1 * p1 * p1;
    w.nnn(i) = e * p1 * p1 * p1 - 3.0 * b * p2 * p1;

    w.bb_b(i) = -f * f * (f * c * m1 * m1 * m1 + 2.0 * a * m1 * m2);
    w.bb_n(i) = -(f * f * (c * mu - t2g) + 2.0 * f * a) * m1 * m1 * p1;
    w.nn_b(i) = (d * f + 2.0 * t1g - 2.0 * a * mu) * m1 * p1 * p1;
    w.nn_n(i) = e * p1 * p1 * p1 - 2.0 * b * p1 * p2;
    w.bn_b(i) = -f * (f * mu * c + a - f * t2g) * m1 * m1 * p1 -
                f * (a * mu - t1g) * m2 * p1;
    w.bn_n(i) = (f * d - a * mu + t1g) * m1 * p1 * p1 + f * t * m1 * p2;
  }
  return w;
}

MDiagonals m_matrices(const Predictors& pr, const CumulantScalars& s) {
  const Index n = pr.mu.size();
  MDiagonals M{VectorXd(n), VectorXd(n), VectorXd(n),
               VectorXd(n), VectorXd(n), VectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    const double mu = pr.mu(i);
    const double f = 1.0 + pr.phi(i);
    const double m1 = pr.dmu(i), m2 = pr.d2mu(i);
    const double p1 = pr.dphi(i), p2 = pr.d2phi(i);
    const double a = s.a(i), b = s.b(i), c = s.c(i), d = s.d(i), e = s.e(i);
    const double t2g = s.tetra_gamma(i);
    const double t = s.tri_gamma(i) - a * mu;

    M.m1(i) = -0.5 * f * f * (f * c * m1 * m1 * m1 + a * m1 * m2);
    M.m2(i) = 0.5 * f * t * m2 * p1 - 0.5 * f * f * (c * mu - t2g) * m1 * m1 * p1;
    M.m3(i) = -0.5 * f *
              ((2.0 * a + f * c * mu - f * t2g) * m1 * m1 * p1 + t * m2 * p1);
    M.m4(i) = 0.5 * ((f * d + 2.0 * t) * m1 * p1 * p1 - f * t * m1 * p2);
    // d (dphi)^2 and t d2phi are both multiplied by dmu; see the contraction
    // kappa_rS^(U) - kappa_rSU / 2.
    M.m5(i) = 0.5 * f * m1 * (d * p1 * p1 + t * p2);
    M.m6(i) = 0.5 * (e * p1 * p1 * p1 - b * p1 * p2);
  }
  return M;
}

MDiagonals m_matrices(const ModelSpec& spec, const VectorXd& theta) {
  const Predictors pr = predictors(spec, theta);
  return m_matrices(pr, cumulant_scalars(pr.mu, pr.phi));
}

BiasWorkspace bias_workspace(const ModelSpec& spec, const VectorXd& theta) {
  const Index n = spec.n();
  const Index p = spec.p();
  const Index q = spec.q();
  const auto& X = spec.X();
  const auto& Z = spec.Z();

  BiasWorkspace ws;
  ws.pred = predictors(spec, theta);
  ws.cumulants = cumulant_scalars(ws.pred.mu, ws.pred.phi);
  ws.M = m_matrices(ws.pred, ws.cumulants);
  ws.K = assemble_information(spec, information_weights(ws.pred));
  ws.Kinv = invert_information(ws.K).inverse;
  ws.Kinv_bb = ws.Kinv.topLeftCorner(p, p);
  ws.Kinv_bn = ws.Kinv.topRightCorner(p, q);
  ws.Kinv_nn = ws.Kinv.bottomRightCorner(q, q);

  ws.P_bb = (X * ws.Kinv_bb).cwiseProduct(X).rowwise().sum();
  ws.P_bn = (X * ws.Kinv_bn).cwiseProduct(Z).rowwise().sum();
  ws.P_nn = (Z * ws.Kinv_nn).cwiseProduct(Z).rowwise().sum();

  const MDiagonals& M = ws.M;
  ws.delta1.resize(2 * n);
  ws.delta1.head(n) = M.m1.cwiseProduct(ws.P_bb) +
                      (M.m2 + M.m3).cwiseProduct(ws.P_bn) +
                      M.m5.cwiseProduct(ws.P_nn);
  ws.delta1.tail(n) = M.m2.cwiseProduct(ws.P_bb) +
                      (M.m4 + M.m5).cwiseProduct(ws.P_bn) +
                      M.m6.cwiseProduct(ws.P_nn);
  return ws;
}

VectorXd bias_score_term(const ModelSpec& spec, const BiasWorkspace& ws) {
  const Index n = spec.n();
  VectorXd out(spec.dim());
  out << spec.X().transpose() * ws.delta1.head(n),
      spec.Z().transpose() * ws.delta1.tail(n);
  return out;
}

BiasResult cox_snell_bias(const ModelSpec& spec, const VectorXd& theta) {
  const Index n = spec.n();
  const BiasWorkspace ws = bias_workspace(spec, theta);
  const VectorXd upper = spec.X().transpose() * ws.delta1.head(n);
  const VectorXd lower = spec.Z().transpose() * ws.delta1.tail(n);

  BiasResult r;
  r.bias_beta = ws.Kinv_bb * upper + ws.Kinv_bn * lower;
  r.bias_nu = ws.Kinv_bn.transpose() * upper + ws.Kinv_nn * lower;

  const InfoBlocks info = expected_information(spec, theta);
  const MatrixXd K = info.Xtilde.transpose() * info.Ktilde * info.Xtilde;
  r.joint = K.llt().solve(info.Xtilde.transpose() * ws.delta1);
  return r;
}

ParamVector corrected_estimate(const ParamVector& theta_hat,
                               const ModelSpec& spec) {
  const VectorXd theta = theta_hat.theta();
  const BiasResult bias = cox_snell_bias(spec, theta);
  return ParamVector::split(theta - bias.joint, spec.p());
}

VectorXd modified_score(const ModelSpec& spec, const VectorXd& theta) {
  const BiasWorkspace ws = bias_workspace(spec, theta);
  return score(spec, theta) - bias_score_term(spec, ws);
}

}  // namespace bpreg
