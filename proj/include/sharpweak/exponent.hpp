#pragma once

#include <stdexcept>
#include <string>

namespace sharpweak {

// Parameter ranges the formulas branch on.
enum class Regime {
  SubOne,     // 0 < p < 1
  OrthRange,  // 1 <= p <= 2
  SuperTwo,   // p > 2
  General,    // 1 < p < infinity, used by the strong-type constants
};

std::string to_string(Regime r);

// The exponent p together with the regime it is being used in.
//
// The single-argument constructor infers the natural regime from p. The
// two-argument form validates an explicitly requested regime, which is how
// callers ask for the General tag.
class Exponent {
 public:
  explicit Exponent(double p);
  Exponent(double p, Regime regime);

  double value() const { return p_; }
  Regime regime() const { return regime_; }

  // p* = max{p, p/(p-1)}; only defined for p > 1.
  double conjugate_max() const;

 private:
  double p_;
  Regime regime_;
};

Regime natural_regime(double p);

}  // namespace sharpweak
