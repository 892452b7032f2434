#pragma once

#include <stdexcept>

namespace sharpweak {

// A point of R_+ x R, the domain of the special functions for
// non-negative dominating processes.
struct HalfPlanePoint {
  double x = 0.0;
  double y = 0.0;

  HalfPlanePoint() = default;
  HalfPlanePoint(double x_, double y_) : x(x_), y(y_) {
    if (!(x_ >= 0.0)) throw std::domain_error("half-plane point needs x >= 0");
  }
};

// Extended gradient (phi, psi) of a special function.
struct Gradient {
  double phi = 0.0;
  double psi = 0.0;
};

}  // namespace sharpweak
