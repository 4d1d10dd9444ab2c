#include "bpreg/special.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "bpreg/errors.hpp"

namespace bpreg {
namespace {

// Below this point arguments are shifted upward with the recurrences before
// the Bernoulli-number asymptotic series is applied.
constexpr double kAsymptoticThreshold = 10.0;

void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream msg;
    msg << fn << ": argument must be positive and finite, got " << x;
    throw DomainError(msg.str());
  }
}

// psi(x) ~ ln x - 1/(2x) - sum_k B_2k / (2k x^2k)
double digamma_asymptotic(double x) {
  const double r = 1.0 / (x * x);
  const double series =
      r * (1.0 / 12 -
           r * (1.0 / 120 -
                r * (1.0 / 252 -
                     r * (1.0 / 240 -
                          r * (1.0 / 132 - r * (691.0 / 32760 - r / 12.0))))));
  return std::log(x) - 0.5 / x - series;
}

// psi'(x) ~ 1/x + 1/(2x^2) + sum_k B_2k / x^(2k+1)
double trigamma_asymptotic(double x) {
  const double r = 1.0 / (x * x);
  const double series =
      r * (1.0 / 6 -
           r * (1.0 / 30 -
                r * (1.0 / 42 -
                     r * (1.0 / 30 -
                          r * (5.0 / 66 - r * (691.0 / 2730 - r * 7.0 / 6))))));
  return (1.0 + 0.5 / x + series) / x;
}

// psi''(x) ~ -1/x^2 - 1/x^3 - sum_k (2k+1) B_2k / x^(2k+2)
double tetragamma_asymptotic(double x) {
  const double r = 1.0 / (x * x);
  const double series =
      r * (0.5 -
           r * (1.0 / 6 -
                r * (1.0 / 6 -
                     r * (3.0 / 10 -
                          r * (5.0 / 6 - r * (691.0 / 210 - r * 35.0 / 2))))));
  return -(1.0 + 1.0 / x + series) * r;
}

// Number of unit shifts needed to bring x to the asymptotic range.
int shift_count(double x) {
  return x >= kAsymptoticThreshold
             ? 0
             : static_cast<int>(std::ceil(kAsymptoticThreshold - x));
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double digamma(double x) {
  require_positive(x, "digamma");
  const int shifts = shift_count(x);
  double value = digamma_asymptotic(x + shifts);
  // smallest corrections first
  for (int k = shifts - 1; k >= 0; --k) value -= 1.0 / (x + k);
  return value;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  const int shifts = shift_count(x);
  double value = trigamma_asymptotic(x + shifts);
  for (int k = shifts - 1; k >= 0; --k) {
    const double t = x + k;
    value += 1.0 / (t * t);
  }
  return value;
}

double tetragamma(double x) {
  require_positive(x, "tetragamma");
  const int shifts = shift_count(x);
  double value = tetragamma_asymptotic(x + shifts);
  for (int k = shifts - 1; k >= 0; --k) {
    const double t = x + k;
    value -= 2.0 / (t * t * t);
  }
  return value;
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

}  // namespace bpreg
