#include "bpreg/link.hpp"

#include <cmath>

#include "bpreg/errors.hpp"

namespace bpreg {

std::string Link::name() const {
  switch (kind_) {
    case LinkKind::log:
      return "log";
  }
  return "unknown";
}

double Link::eval(double m) const {
  switch (kind_) {
    case LinkKind::log:
      if (!(m > 0.0)) throw DomainError("log link: argument must be positive");
      return std::log(m);
  }
  return 0.0;
}

double Link::inverse(double eta) const {
  switch (kind_) {
    case LinkKind::log:
      return std::exp(eta);
  }
  return 0.0;
}

double Link::inverse_change(double eta, double delta) const {
  switch (kind_) {
    case LinkKind::log:
      return std::exp(eta) * std::expm1(delta);
  }
  return 0.0;
}

double Link::d1(double eta) const {
  switch (kind_) {
    case LinkKind::log:
      return std::exp(eta);
  }
  return 0.0;
}

double Link::d2(double eta) const {
  switch (kind_) {
    case LinkKind::log:
      return std::exp(eta);
  }
  return 0.0;
}

}  // namespace bpreg
