#pragma once

#include "sharpweak/half_plane.hpp"

namespace sharpweak {

// W(x, y) = 2x - x^2 + y^2 when x + |y| <= 1, and 1 otherwise. Used for
// the 0 < p < 1 weak-type bound; it takes values in [0, 1].
double w_value(HalfPlanePoint pt);

// (phi, psi) = (2 - 2x, 2y) on x + |y| <= 1 and (0, 0) beyond. On the
// line x + |y| = 1 the inner formulas apply.
Gradient w_gradient_ext(HalfPlanePoint pt);

// W(x+h, y+k) <= W(x, y) + phi h + psi k, up to 1e-12. Requires x >= 0,
// x + h >= 0 and |k| <= |h|; throws std::domain_error otherwise. (With
// |h| <= |k| instead the inequality fails already at x = y = h = 0.)
bool w_tangent_check(double x, double y, double h, double k);

// W >= 1{x+|y| >= 1} everywhere and, when |y| <= x, W <= (2x)^p for the
// given p in (0, 1). Both with 1e-12 slack.
bool w_bounds_check(HalfPlanePoint pt, double p);

}  // namespace sharpweak
