#include "sharpweak/special_w.hpp"

#include <cmath>
#include <stdexcept>

namespace sharpweak {

namespace {
constexpr double kSlack = 1e-12;

bool inside(HalfPlanePoint pt) { return pt.x + std::abs(pt.y) <= 1.0; }
}  // namespace

double w_value(HalfPlanePoint pt) {
  if (!inside(pt)) return 1.0;
  return 2.0 * pt.x - pt.x * pt.x + pt.y * pt.y;
}

Gradient w_gradient_ext(HalfPlanePoint pt) {
  if (!inside(pt)) return {0.0, 0.0};
  return {2.0 - 2.0 * pt.x, 2.0 * pt.y};
}

bool w_tangent_check(double x, double y, double h, double k) {
  if (!(x >= 0.0 && x + h >= 0.0)) throw std::domain_error("w_tangent_check: needs x >= 0 and x + h >= 0");
  if (!(std::abs(k) <= std::abs(h))) throw std::domain_error("w_tangent_check: needs |k| <= |h|");
  const HalfPlanePoint base(x, y);
  const Gradient d = w_gradient_ext(base);
  return w_value({x + h, y + k}) <= w_value(base) + d.phi * h + d.psi * k + kSlack;
}

bool w_bounds_check(HalfPlanePoint pt, double p) {
  const double w = w_value(pt);
  const double indicator = pt.x + std::abs(pt.y) >= 1.0 ? 1.0 : 0.0;
  bool ok = w >= indicator - kSlack;
  if (std::abs(pt.y) <= pt.x) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("w_bounds_check: needs 0 < p < 1");
    ok = ok && w <= std::pow(2.0 * pt.x, p) + kSlack;
  }
  return ok;
}

}  // namespace sharpweak
