#include "bpreg/bpdist.hpp"

#include <cmath>
#include <sstream>

#include "bpreg/errors.hpp"
#include "bpreg/special.hpp"

namespace bpreg {

void BpParams::validate() const {
  if (!(mu > 0.0) || !(phi > 0.0) || !std::isfinite(mu) ||
      !std::isfinite(phi)) {
    std::ostringstream msg;
    msg << "BP parameters must be positive and finite (mu=" << mu
        << ", phi=" << phi << ")";
    throw DomainError(msg.str());
  }
}

double log_pdf(const BpParams& params, double y) {
  params.validate();
  if (!(y > 0.0) || !std::isfinite(y))
    throw DomainError("BP density: y must be positive and finite");
  const double a = params.shape1();
  const double b = params.shape2();
  return (a - 1.0) * std::log(y) - (a + b) * std::log1p(y) - log_beta(a, b);
}

double pdf(const BpParams& params, double y) {
  return std::exp(log_pdf(params, y));
}

Moments moments(const BpParams& params) {
  params.validate();
  return {params.mu, params.mu * (1.0 + params.mu) / params.phi};
}

double draw(const BpParams& params, RandomStream& rng) {
  const double a = params.shape1();
  const double b = params.shape2();
  for (;;) {
    // Y = G_a / G_b directly; equal to X / (1 - X) with X = G_a / (G_a + G_b)
    // but without cancellation when X is close to 1.
    const double ga = rng.gamma(a);
    const double gb = rng.gamma(b);
    const double y = ga / gb;
    if (y > 0.0 && std::isfinite(y)) return y;
  }
}

std::vector<double> sample(const BpParams& params, RandomStream& rng,
                           std::size_t count) {
  params.validate();
  if (count == 0) throw DomainError("sample: count must be at least 1");
  std::vector<double> out(count);
  for (auto& y : out) y = draw(params, rng);
  return out;
}

}  // namespace bpreg
