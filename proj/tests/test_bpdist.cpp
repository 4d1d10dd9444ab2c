#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "bpreg/bpdist.hpp"
#include "bpreg/errors.hpp"
#include "bpreg/random.hpp"

using namespace bpreg;

namespace {

double integrate_density(const BpParams& p, int power) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(
      [&](double y) { return std::pow(y, power) * std::exp(log_pdf(p, y)); },
      1e-14);
}

// E[Y^k] = B(shape1 + k, shape2 - k) / B(shape1, shape2), finite for k < shape2.
double raw_moment(const BpParams& p, int k) {
  return boost::math::beta(p.shape1() + k, p.shape2() - k) /
         boost::math::beta(p.shape1(), p.shape2());
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// KS distance between the sample and the CDF obtained by integrating the
// density between consecutive order statistics.
double ks_distance(const BpParams& p, std::vector<double> ys) {
  std::sort(ys.begin(), ys.end());
  const auto f = [&](double y) { return std::exp(log_pdf(p, y)); };
  const double n = static_cast<double>(ys.size());
  double cdf = 0.0;
  double prev = 0.0;
  double dist = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] > prev)
      cdf += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, prev, ys[i], 0);
    prev = ys[i];
    dist = std::max({dist, std::abs(cdf - i / n), std::abs((i + 1) / n - cdf)});
  }
  return dist;
}

}  // namespace

TEST(BpDensity, ClosedFormValue) {
  EXPECT_NEAR(log_pdf({1.0, 1.0}, 1.0), std::log(0.375), 1e-13);
  EXPECT_NEAR(log_pdf({1.0, 1.0}, 1.0), -0.9808292530, 1e-10);
  EXPECT_NEAR(pdf({1.0, 1.0}, 1.0), 0.375, 1e-14);
}

TEST(BpDensity, MatchesFormulaTerms) {
  const BpParams p{2.3, 0.7};
  const double a = p.shape1(), b = p.shape2();
  for (double y : {1e-4, 0.2, 1.0, 7.5, 1e3}) {
    const double expect = (a - 1) * std::log(y) - (a + b) * std::log1p(y) -
                          std::log(boost::math::beta(a, b));
    EXPECT_NEAR(log_pdf(p, y), expect, 1e-11 * std::max(1.0, std::abs(expect)));
  }
}

TEST(BpDensity, IntegratesToOne) {
  for (BpParams p : {BpParams{1, 1}, BpParams{0.5, 4}, BpParams{3, 2},
                     BpParams{2, 3}, BpParams{0.2, 0.5}})
    EXPECT_NEAR(integrate_density(p, 0), 1.0, 1e-6) << p.mu << "," << p.phi;
}

TEST(BpDensity, NumericalMean) {
  EXPECT_NEAR(integrate_density({2.0, 3.0}, 1), 2.0, 1e-5);
}

TEST(BpDensity, NumericalVariance) {
  const BpParams p{0.5, 4.0};
  const double m1 = integrate_density(p, 1);
  const double m2 = integrate_density(p, 2);
  EXPECT_NEAR(m2 - m1 * m1, 0.1875, 1e-6);
}

TEST(BpDensity, DomainErrors) {
  EXPECT_THROW(log_pdf({1.0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(log_pdf({1.0, 1.0}, -2.0), DomainError);
  EXPECT_THROW(log_pdf({0.0, 1.0}, 1.0), DomainError);
  EXPECT_THROW(log_pdf({1.0, -1.0}, 1.0), DomainError);
  EXPECT_THROW(moments({1.0, 0.0}), DomainError);
}

TEST(BpDensity, ModeIsUniqueMaximum) {
  for (BpParams p : {BpParams{1, 1}, BpParams{3, 2}, BpParams{0.8, 5}}) {
    ASSERT_GT(p.shape1(), 1.0);
    const double mode = (p.shape1() - 1.0) / (p.phi + 3.0);
    const double h = 1e-6;
    int crossings = 0;
    double prev_slope = 0.0;
    for (int k = 1; k <= 4000; ++k) {
      const double y = mode * 4.0 * k / 4000.0;
      const double slope =
          (log_pdf(p, y + h) - log_pdf(p, y - h)) / (2.0 * h);
      if (k > 1 && (prev_slope > 0.0) != (slope > 0.0)) ++crossings;
      prev_slope = slope;
      EXPECT_LE(log_pdf(p, y), log_pdf(p, mode) + 1e-12);
    }
    EXPECT_EQ(crossings, 1);
  }
}

TEST(BpMoments, Formula) {
  const Moments a = moments({1.0, 1.0});
  EXPECT_DOUBLE_EQ(a.mean, 1.0);
  EXPECT_DOUBLE_EQ(a.variance, 2.0);
  const Moments b = moments({0.5, 4.0});
  EXPECT_DOUBLE_EQ(b.mean, 0.5);
  EXPECT_DOUBLE_EQ(b.variance, 0.1875);
}

TEST(BpMoments, VarianceDecreasesInPrecision) {
  double prev = INFINITY;
  for (double phi = 0.1; phi < 1e6; phi *= 1.7) {
    const double v = moments({1.0, phi}).variance;
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(BpSample, DeterministicGivenSeed) {
  RandomStream a(123), b(123), c(124);
  const auto va = sample({1.0, 1.0}, a, 1000);
  const auto vb = sample({1.0, 1.0}, b, 1000);
  const auto vc = sample({1.0, 1.0}, c, 1000);
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
  for (double y : va) EXPECT_GT(y, 0.0);
}

TEST(BpSample, MeanWithinCltBand) {
  const std::size_t n = 100000;
  for (BpParams p : {BpParams{1, 1}, BpParams{0.5, 4}, BpParams{3, 2}}) {
    RandomStream rng(99);
    const auto v = sample(p, rng, n);
    const double se = std::sqrt(moments(p).variance / n);
    EXPECT_NEAR(mean_of(v), p.mu, 3.0 * se) << p.mu << "," << p.phi;
  }
}

TEST(BpSample, VarianceWithinTenPercent) {
  RandomStream rng(7);
  const auto v = sample({1.0, 1.0}, rng, 100000);
  EXPECT_NEAR(variance_of(v), 2.0, 0.2);
}

// The sample variance has a CLT standard error only when E[Y^4] is finite,
// i.e. shape2 = phi + 2 > 4.
TEST(BpSample, VarianceWithinCltBand) {
  const std::size_t n = 100000;
  for (BpParams p : {BpParams{0.5, 4}, BpParams{2, 5}}) {
    ASSERT_GT(p.shape2(), 4.0);
    RandomStream rng(11);
    const auto v = sample(p, rng, n);
    const double m = p.mu;
    const double mu4 = raw_moment(p, 4) - 4 * m * raw_moment(p, 3) +
                       6 * m * m * raw_moment(p, 2) - 3 * std::pow(m, 4);
    const double var = moments(p).variance;
    const double se = std::sqrt((mu4 - var * var) / n);
    EXPECT_NEAR(variance_of(v), var, 3.0 * se) << p.mu << "," << p.phi;
  }
}

TEST(BpSample, KolmogorovSmirnov) {
  const std::size_t n = 100000;
  const double critical = 1.628 / std::sqrt(static_cast<double>(n));
  for (BpParams p : {BpParams{1, 1}, BpParams{0.5, 4}, BpParams{3, 2}}) {
    RandomStream rng(2024);
    EXPECT_LT(ks_distance(p, sample(p, rng, n)), critical)
        << p.mu << "," << p.phi;
  }
}

TEST(BpSample, RejectsBadArguments) {
  RandomStream rng(1);
  EXPECT_THROW(sample({1.0, 1.0}, rng, 0), DomainError);
  EXPECT_THROW(sample({-1.0, 1.0}, rng, 5), DomainError);
}

TEST(RandomStream, DerivedStreamsDiffer) {
  RandomStream root(5);
  EXPECT_NE(root.derive(0).seed(), root.derive(1).seed());
  EXPECT_EQ(root.derive(3).seed(), RandomStream(5).derive(3).seed());
  RandomStream a = root.derive(2), b = root.derive(2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, UniformInOpenInterval) {
  RandomStream rng(17);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
