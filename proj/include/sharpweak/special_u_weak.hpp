#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sharpweak/exponent.hpp"
#include "sharpweak/half_plane.hpp"
#include "sharpweak/ode_g.hpp"

namespace sharpweak {

// The eight pieces the special function for p > 2 is glued from. D0 is
// |y| >= 1; D1..D6 are given by explicit inequalities in (x, |y|) and D7 is
// whatever is left.
enum class Region { D0, D1, D2, D3, D4, D5, D6, D7 };

constexpr int kRegionCount = 8;
std::string to_string(Region r);
constexpr int index(Region r) { return static_cast<int>(r); }

// Everything the p > 2 special function needs: p, the tabulated G and its
// inverse h, and the per-region sign of U_xy fixed once by a probe.
// Immutable once built.
class UWContext {
 public:
  static UWContext build(Exponent p, double boundary_tol = 1e-9);

  double p() const { return p_; }
  // p^p / (2^p (p-1)), the weak constant raised to the p-th power.
  double c0() const { return c0_; }
  const GSolution& g() const { return *g_; }
  const HSolution& h() const { return h_; }
  double boundary_tol() const { return boundary_tol_; }

  // U_xy = sign * (U_xx + U_yy) / 2 in the region, for y > 0. -1 where U is
  // linear along (1, 1), +1 where it is linear along (1, -1).
  int mixed_sign(Region r) const { return mixed_sign_[static_cast<std::size_t>(index(r))]; }

 private:
  UWContext(double p, std::shared_ptr<const GSolution> g, double boundary_tol);

  double p_;
  double c0_;
  std::shared_ptr<const GSolution> g_;
  HSolution h_;
  double boundary_tol_;
  std::array<int, kRegionCount> mixed_sign_{};
};

// First region, in the order D0..D6, whose defining inequalities hold at
// (x, |y|); D7 if none does. Throws EvaluationError if h is needed beyond
// its table.
Region classify(const UWContext& ctx, HalfPlanePoint pt);

// The formula for region r evaluated at (x, |y|), whether or not the point
// lies in r. Used to compare neighbouring branches across a boundary.
double u_branch(const UWContext& ctx, Region r, HalfPlanePoint pt);

double u_value(const UWContext& ctx, HalfPlanePoint pt);

// V = 1{|y| >= 1} - c0 x^p, the function U majorizes.
double v_value(const UWContext& ctx, HalfPlanePoint pt);

// Partial derivatives from region r's formula, reflected for y < 0
// (phi even in y, psi odd).
Gradient u_gradient_branch(const UWContext& ctx, Region r, HalfPlanePoint pt);

// (phi, psi) everywhere. On the line where D3 meets D4 and on |y| = 1 the
// classification already selects the one-sided values (right limit in x,
// and the D0 side respectively).
Gradient u_gradient_ext(const UWContext& ctx, HalfPlanePoint pt);

struct SecondDerivatives {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double quadratic_form(double h, double k) const { return xx * h * h + 2.0 * xy * h * k + yy * k * k; }
};

// Hessian of U at a point at least boundary_tol away from every region
// boundary. Throws EvaluationError on or near a boundary.
SecondDerivatives u_second_derivs(const UWContext& ctx, HalfPlanePoint pt);

// True if the point and its 8 neighbours at distance `radius` share a region.
bool is_interior(const UWContext& ctx, HalfPlanePoint pt, double radius);

// U(x+h, y+k) <= U(x, y) + phi h + psi k + 1e-9. Requires x >= 0,
// x + h >= 0 and |k| <= |h|; throws std::domain_error otherwise.
bool tangent_check(const UWContext& ctx, double x, double y, double h, double k);

// t -> phi(x+t, y+t) - psi(x+t, y+t) is non-increasing (1e-9 slack) on the
// sorted grid. Every grid point must satisfy x + t >= 0, |y + t| < 1.
bool diagonal_monotone_check(const UWContext& ctx, double x, double y, std::span<const double> t_grid);

// U >= V - 1e-10.
bool majorization_check(const UWContext& ctx, HalfPlanePoint pt);

// Difference of one-sided directional slopes where D3 meets D4:
//   -p^2/(2(p-1)) + 1/(2x) + p^p/(2(p-1)) x^{p-1}.
double corner_slope_gap(double p, double x);

// ---------------------------------------------------------------------------
// Boundary sampling

struct BoundarySample {
  Region a = Region::D0;
  Region b = Region::D0;
  HalfPlanePoint on_a;  // last point classified in a
  HalfPlanePoint on_b;  // first point classified in b, within 1e-13 of on_a
  double gap = 0.0;     // |branch_a(on_a) - branch_b(on_b)|
};

struct ContinuityScan {
  // Keyed by the unordered region pair (lower index first).
  std::map<std::pair<Region, Region>, std::vector<BoundarySample>> by_pair;
  long segments_tried = 0;

  double worst_gap() const;
};

// Random short segments in [0, 2.5] x [-1.6, 1.6]; every segment whose
// endpoints land in different regions is bisected down to the boundary and
// the two branch formulas are compared there. Sampling continues near
// known boundary points until every pair seen at least `min_hits` times
// has `per_pair` samples or the segment budget runs out. Points within
// `exclusion` of (0, +-1), where U is discontinuous, are skipped.
ContinuityScan scan_continuity(const UWContext& ctx, int per_pair, std::uint64_t seed, double exclusion = 1e-3,
                               int min_hits = 50);

// Boundary points in [0, x_max] x [0, y_max] found by bisection along
// horizontal and vertical scan lines, for plotting the region map.
std::vector<BoundarySample> trace_boundaries(const UWContext& ctx, double x_max, double y_max, int lines);

}  // namespace sharpweak
