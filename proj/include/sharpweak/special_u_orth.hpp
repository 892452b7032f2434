#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sharpweak/exponent.hpp"

namespace sharpweak {

// Point of the open upper half-plane.
struct HalfPlaneImage {
  double alpha = 0.0;
  double beta = 0.0;
};

// z = x + iy -> i e^{pi z / 2}, mapping the strip |y| < 1 onto the upper
// half-plane. Throws std::domain_error for |y| >= 1.
HalfPlaneImage conformal_strip_to_half(double x, double y);

// Parameters of the orthogonal-case special function, 1 <= p <= 2.
class OrthContext {
 public:
  explicit OrthContext(Exponent p, double quad_tol = 1e-8);

  double p() const { return p_; }
  double quad_tol() const { return quad_tol_; }
  // K_p^p.
  double kpp() const { return kpp_; }
  // How poisson_w splits the line, for reports.
  std::string quad_split() const;

 private:
  double p_;
  double quad_tol_;
  double kpp_;
};

// Poisson integral of (2/pi)^p |log|t||^p:
//
//   W(alpha, beta) = 2^p / pi^{p+1} * int beta |log|t||^p / ((alpha - t)^2 + beta^2) dt.
//
// Each half-line is mapped by t = +-e^s and integrated with adaptive
// Gauss-Kronrod on a finite s-window; the window is widened until an
// exponential bound on the discarded tails is below quad_tol / 4. Near
// t = alpha, where the kernel narrows as beta -> 0, the substitution
// t = alpha + beta tan(theta) is used instead.
// Throws std::domain_error for beta <= 0 and QuadratureError if a panel
// does not converge.
double poisson_w(const OrthContext& ctx, double alpha, double beta);

// |x|^p for |y| >= 1, W at the conformal image of (x, y) otherwise.
double u_orth(const OrthContext& ctx, double x, double y);

// 1{|y| >= 1} - K_p^p |x|^p. It is 1 - K_p^p U, not U itself, that lies
// above V.
double v_orth(const OrthContext& ctx, double x, double y);

// One property of the randomized suite. margin is the smallest slack seen
// (negative when violated beyond tolerance).
struct OrthCheck {
  std::string name;
  long samples = 0;
  long violations = 0;
  double worst_margin = 0.0;
  double tolerance = 0.0;
};

struct OrthReport {
  double p = 0.0;
  std::vector<OrthCheck> checks;

  bool passed() const;
};

// Randomized checks on the strip and its complement: concavity in y and
// convexity in x by second differences, non-negative mixed difference for
// x > 0, 0 < y < 1, U >= U(0, 0) when |y| <= |x|,
// U <= |x|^p + K_p^{-p} 1{|y| < 1}, 1 - K_p^p U >= V, and four-fold
// symmetry.
// Finite-difference tolerances scale with quad_tol / step^2.
OrthReport orth_property_suite(const OrthContext& ctx, int samples = 200, std::uint64_t seed = 1);

// |x + h|^p + |x - h|^p <= 2|x|^p + 2|h|^p + 1e-12, for 1 <= p <= 2.
bool scalar_inequality_check(Exponent p, double x, double h);

}  // namespace sharpweak
