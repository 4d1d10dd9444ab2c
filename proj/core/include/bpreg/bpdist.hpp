#pragma once

#include <cstddef>
#include <vector>

#include "bpreg/random.hpp"

namespace bpreg {

// Beta prime distribution in the mean/precision parameterization:
// shape1 = mu (1 + phi), shape2 = phi + 2, E[Y] = mu, Var[Y] = mu (1 + mu) / phi.
struct BpParams {
  double mu;
  double phi;

  double shape1() const { return mu * (1.0 + phi); }
  double shape2() const { return phi + 2.0; }

  // Throws DomainError unless mu > 0 and phi > 0 (both finite).
  void validate() const;
};

struct Moments {
  double mean;
  double variance;
};

double log_pdf(const BpParams& params, double y);
double pdf(const BpParams& params, double y);

Moments moments(const BpParams& params);

// One draw: X ~ Beta(shape1, shape2) and Y = X / (1 - X).
double draw(const BpParams& params, RandomStream& rng);

std::vector<double> sample(const BpParams& params, RandomStream& rng,
                           std::size_t count);

}  // namespace bpreg
