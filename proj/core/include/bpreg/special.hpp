#pragma once

// Gamma-family special functions on the positive real line.
//
// All functions throw bpreg::DomainError for x <= 0 or non-finite x.

namespace bpreg {

double log_gamma(double x);

// psi(x) = d/dx log Gamma(x).
double digamma(double x);

// psi'(x).
double trigamma(double x);

// psi''(x).
double tetragamma(double x);

// log B(a, b) = log_gamma(a) + log_gamma(b) - log_gamma(a + b).
double log_beta(double a, double b);

}  // namespace bpreg
