#pragma once

#include <string>
#include <vector>

#include "sharpweak/exponent.hpp"

namespace sharpweak {

struct SharpConstant {
  double value = 0.0;
  std::string name;
  double p = 0.0;
  // Number of series terms summed; 0 for closed-form constants.
  int series_terms_used = 0;
};

// Euler Gamma for x > 0. Throws std::domain_error otherwise.
double gamma(double x);

// Partial sum of 1 - 3^-s + 5^-s - ..., stopped as soon as the next term
// drops below tol. The alternating-series remainder is then below tol.
struct AlternatingSum {
  double value;
  int terms;
};
AlternatingSum dirichlet_beta(double s, double tol);

// Sharp weak-type constant for orthogonal martingales, 1 <= p <= 2:
//
//   K_p^p = (pi/2)^{p-1} (pi^2/8) / (Gamma(p+1) * beta(p+1))
//
// where beta is the Dirichlet beta function. The numerator series
// sum 1/(2k+1)^2 is taken in closed form; the denominator is summed until
// the next term is below tol/4. K_p moves by at most 1.5 times the series
// error on [1, 2], so the result itself is within tol.
SharpConstant kp(Exponent p, double tol = 1e-12);

// Weak-type constant for non-negative dominating martingales: 2 for p < 1,
// (p/2)(p-1)^{-1/p} for p >= 2. Throws std::domain_error on [1, 2).
SharpConstant weak_constant_nonneg(Exponent p);

// p^p / (2^p (p-1)), the p-th power of the p >= 2 constant above.
double weak_constant_pth_power(Exponent p);

// Optimal strong-type constant for non-negative f: 1/(p-1) on (1, 2],
// [p(p-1)/2]^{1/p} on (2, inf).
double nonneg_strong_constant(Exponent p);

// The classical constants that are valid at p, each labelled with the
// inequality it belongs to. Constants outside their range are omitted.
std::vector<SharpConstant> reference_constants(Exponent p);

}  // namespace sharpweak
