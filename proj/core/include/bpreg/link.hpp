#pragma once

#include <string>

namespace bpreg {

enum class LinkKind { log };

// Link g mapping a positive parameter to its linear predictor, with the
// inverse-link derivatives the information and bias formulas need.
class Link {
 public:
  constexpr Link() = default;
  constexpr explicit Link(LinkKind kind) : kind_(kind) {}

  static constexpr Link log() { return Link(LinkKind::log); }

  LinkKind kind() const { return kind_; }
  std::string name() const;

  // g(m)
  double eval(double m) const;
  // g^{-1}(eta)
  double inverse(double eta) const;
  // g^{-1}(eta + delta) - g^{-1}(eta) without cancellation
  double inverse_change(double eta, double delta) const;
  // d g^{-1} / d eta
  double d1(double eta) const;
  // d^2 g^{-1} / d eta^2
  double d2(double eta) const;

 private:
  LinkKind kind_ = LinkKind::log;
};

}  // namespace bpreg
