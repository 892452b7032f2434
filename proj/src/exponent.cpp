#include "sharpweak/exponent.hpp"

#include <cmath>

namespace sharpweak {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::SubOne: return "SubOne";
    case Regime::OrthRange: return "OrthRange";
    case Regime::SuperTwo: return "SuperTwo";
    case Regime::General: return "General";
  }
  return "?";
}

Regime natural_regime(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw std::domain_error("exponent must be a finite positive number, got " + std::to_string(p));
  }
  if (p < 1.0) return Regime::SubOne;
  if (p <= 2.0) return Regime::OrthRange;
  return Regime::SuperTwo;
}

Exponent::Exponent(double p) : p_(p), regime_(natural_regime(p)) {}

Exponent::Exponent(double p, Regime regime) : p_(p), regime_(regime) {
  const Regime natural = natural_regime(p);
  const bool ok = regime == Regime::General ? p > 1.0 : regime == natural;
  if (!ok) {
    throw std::domain_error("exponent " + std::to_string(p) + " is not in regime " + to_string(regime));
  }
}

double Exponent::conjugate_max() const {
  if (!(p_ > 1.0)) throw std::domain_error("p* needs p > 1");
  return std::max(p_, p_ / (p_ - 1.0));
}

}  // namespace sharpweak
