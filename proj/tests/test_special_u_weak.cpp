#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "sharpweak/errors.hpp"
#include "sharpweak/ode_g.hpp"
#include "sharpweak/special_u_weak.hpp"

using namespace sharpweak;

namespace {

const UWContext& context(double p) {
  static const UWContext c25 = UWContext::build(Exponent(2.5));
  static const UWContext c3 = UWContext::build(Exponent(3.0));
  static const UWContext c4 = UWContext::build(Exponent(4.0));
  if (p == 2.5) return c25;
  if (p == 3.0) return c3;
  return c4;
}

// h = G^{-1} through the Bessel closed form and bisection; independent of
// the tabulated G used by the library.
double h_bisect(const BesselLinearization& lin, double s) {
  double lo = 2.0 / lin.p();
  double hi = s + 1.0;
  for (int i = 0; i < 64; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lin.g(mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// The defining region inequalities, each evaluated on its own. Returns the
// first region that holds, or nothing when some inequality is within `gap`
// of switching.
std::optional<Region> brute_region(const BesselLinearization& lin, double x, double y, double gap) {
  const double p = lin.p();
  const double a = std::abs(y);
  const double s = x + a;
  bool close = false;
  auto le = [&](double l, double r) {
    if (std::abs(l - r) < gap) close = true;
    return l <= r;
  };
  auto lt = [&](double l, double r) {
    if (std::abs(l - r) < gap) close = true;
    return l < r;
  };
  std::array<bool, 7> in{};
  in[0] = le(1.0, a);
  in[1] = le((p - 1.0) * x, a) && lt(a, x + 1.0 - 2.0 / p);
  in[2] = le((p - 2.0) / 2.0 * x, a) && lt(a, std::min(1.0 - x, (p - 1.0) * x));
  in[3] = le(x + 1.0 - 2.0 / p, a) && lt(a, 1.0 - x);
  in[4] = le(std::max(1.0 - x, x + 1.0 - 2.0 / p), a) && lt(a, 1.0);
  if (le(1.0, s)) {
    const double h = h_bisect(lin, s);
    in[5] = le(x, h) && lt((-1.0 + h + s) / 2.0, x);
    in[6] = le((1.0 - h + s) / 2.0, a) && lt(a, std::min(x + 1.0 - 2.0 / p, 1.0));
  }
  if (close) return std::nullopt;
  for (int i = 0; i < 7; ++i) {
    if (in[static_cast<std::size_t>(i)]) return static_cast<Region>(i);
  }
  return Region::D7;
}

double c0(double p) { return std::pow(p, p) / (std::pow(2.0, p) * (p - 1.0)); }

// Branch formulas retyped for y >= 0.
double reference_branch(const BesselLinearization& lin, Region r, double x, double y) {
  const double p = lin.p();
  const double s = x + y;
  switch (r) {
    case Region::D0:
      return 1.0 - c0(p) * std::pow(x, p);
    case Region::D1:
      return std::pow(p, p) / (2.0 * (p - 1.0) * std::pow(p - 2.0, p - 2.0)) * x * std::pow(y - x, p - 1.0);
    case Region::D2:
      return std::pow(s, p - 1.0) / (p - 1.0) * ((p - 1.0) * y - (p * p - 2.0 * p + 2.0) / 2.0 * x);
    case Region::D3:
      return x / (2.0 * (p - 1.0) * (1.0 + x - y)) * (-(p - 2.0) * (p - 2.0) + p * p * (y - x));
    case Region::D4:
      return 1.0 - p * p / (2.0 * (p - 1.0)) * (1.0 - y) - c0(p) * (x + y - 1.0) * std::pow(x + 1.0 - y, p - 1.0);
    case Region::D5: {
      const double h = h_bisect(lin, s);
      return c0(p) * std::pow(h, p - 1.0) * ((p - 1.0) * h - p * x);
    }
    case Region::D6: {
      const double g = lin.g(x - y + 1.0);
      return 1.0 - 2.0 * (1.0 - y) / (2.0 + x - y - g) - c0(p) * std::pow(x - y + 1.0, p - 1.0) * (x - (p - 1.0) * (1.0 - y));
    }
    case Region::D7:
      return -c0(p) * std::pow(x, p);
  }
  return 0.0;
}

}  // namespace

TEST_CASE("classification examples for p = 3") {
  const UWContext& ctx = context(3.0);
  CHECK(classify(ctx, {0.1, 0.9}) == Region::D4);
  CHECK(classify(ctx, {0.0, 1.5}) == Region::D0);
  // (p-1)x = 0.1 <= 0.12 < x + 1 - 2/p, so the D1 test fires first.
  CHECK(classify(ctx, {0.05, 0.12}) == Region::D1);
  CHECK(classify(ctx, {0.05, -0.12}) == Region::D1);
  CHECK(classify(ctx, {0.05, 0.06}) == Region::D2);
  // The origin satisfies (p-1)x <= |y| < x + 1 - 2/p.
  CHECK(classify(ctx, {0.0, 0.0}) == Region::D1);
  CHECK(classify(ctx, {1.5, 0.0}) == Region::D7);
  CHECK(classify(ctx, {1.0, -0.5}) == Region::D5);
  CHECK(classify(ctx, {1.5, -0.9}) == Region::D6);
  const BesselLinearization lin(3.0);
  CHECK(brute_region(lin, 0.1, 0.9, 0.0) == Region::D4);
  CHECK(brute_region(lin, 0.05, 0.12, 0.0) == Region::D1);
  CHECK(brute_region(lin, 0.05, 0.06, 0.0) == Region::D2);
  CHECK(brute_region(lin, 0.0, 0.0, 0.0) == Region::D1);
}

TEST_CASE("classification against the defining inequalities") {
  for (double p : {2.5, 3.0, 4.0}) {
    CAPTURE(p);
    const UWContext& ctx = context(p);
    const BesselLinearization lin(p);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(0.0, 2.5), uy(-1.6, 1.6);
    std::set<int> seen;
    int mismatches = 0;
    for (int i = 0; i < 20000; ++i) {
      const double x = ux(rng), y = uy(rng);
      const auto expect = brute_region(lin, x, y, 1e-7);
      if (!expect) continue;
      seen.insert(index(*expect));
      if (classify(ctx, {x, y}) != *expect) ++mismatches;
    }
    CHECK(mismatches == 0);
    CHECK(seen.size() == 8);
  }
}

TEST_CASE("branch values match independently typed formulas") {
  for (double p : {2.5, 3.0, 4.0}) {
    CAPTURE(p);
    const UWContext& ctx = context(p);
    const BesselLinearization lin(p);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ux(0.0, 2.5), uy(0.0, 1.6);
    for (int i = 0; i < 5000; ++i) {
      const double x = ux(rng), y = uy(rng);
      const auto r = brute_region(lin, x, y, 1e-7);
      if (!r) continue;
      CAPTURE(to_string(*r));
      const double ref = reference_branch(lin, *r, x, y);
      CHECK(std::abs(u_value(ctx, {x, y}) - ref) < 1e-8 * (1.0 + std::abs(ref)));
      CHECK(u_value(ctx, {x, -y}) == u_value(ctx, {x, y}));
    }
  }
}

TEST_CASE("values and V") {
  const UWContext& ctx = context(3.0);
  CHECK(u_value(ctx, {0.0, 0.0}) == 0.0);
  CHECK(u_value(ctx, {0.0, 1.5}) == 1.0);
  CHECK(v_value(ctx, {0.0, 1.5}) == 1.0);
  CHECK(u_value(ctx, {0.0, 1.0}) == 1.0);
  CHECK(u_value(ctx, {0.0, -1.0}) == 1.0);
  CHECK(ctx.c0() == doctest::Approx(27.0 / 16.0).epsilon(1e-15));
  CHECK(v_value(ctx, {1.0, 0.5}) == doctest::Approx(-27.0 / 16.0));
}

TEST_CASE("U is non-positive on the diagonals") {
  for (double p : {2.5, 3.0, 4.0}) {
    const UWContext& ctx = context(p);
    for (double x = 0.0; x < 2.5; x += 0.001) {
      CHECK(u_value(ctx, {x, x}) <= 1e-15);
      CHECK(u_value(ctx, {x, -x}) <= 1e-15);
    }
  }
}

TEST_CASE("mixed derivative signs from the build probe") {
  for (double p : {2.5, 3.0, 4.0}) {
    const UWContext& ctx = context(p);
    CHECK(ctx.mixed_sign(Region::D1) == -1);
    CHECK(ctx.mixed_sign(Region::D2) == 1);
    CHECK(ctx.mixed_sign(Region::D3) == -1);
    CHECK(ctx.mixed_sign(Region::D4) == -1);
    CHECK(ctx.mixed_sign(Region::D5) == 1);
    CHECK(ctx.mixed_sign(Region::D6) == -1);
  }
}

TEST_CASE("gradient and Hessian against finite differences") {
  for (double p : {2.5, 3.0, 4.0}) {
    CAPTURE(p);
    const UWContext& ctx = context(p);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ux(0.01, 2.5), uy(-1.6, 1.6);
    int checked = 0;
    while (checked < 3000) {
      const double x = ux(rng), y = uy(rng);
      if (!is_interior(ctx, {x, y}, 1e-2)) continue;
      ++checked;
      const double e = 1e-6;
      const Gradient g = u_gradient_ext(ctx, {x, y});
      CHECK(std::abs(g.phi - (u_value(ctx, {x + e, y}) - u_value(ctx, {x - e, y})) / (2 * e)) < 1e-5);
      CHECK(std::abs(g.psi - (u_value(ctx, {x, y + e}) - u_value(ctx, {x, y - e})) / (2 * e)) < 1e-5);

      const double E = 1e-5;
      const SecondDerivatives d = u_second_derivs(ctx, {x, y});
      const Gradient gx1 = u_gradient_ext(ctx, {x + E, y}), gx0 = u_gradient_ext(ctx, {x - E, y});
      const Gradient gy1 = u_gradient_ext(ctx, {x, y + E}), gy0 = u_gradient_ext(ctx, {x, y - E});
      const double scale = 1.0 + std::abs(d.xx) + std::abs(d.yy);
      CHECK(std::abs(d.xx - (gx1.phi - gx0.phi) / (2 * E)) < 1e-6 * scale);
      CHECK(std::abs(d.yy - (gy1.psi - gy0.psi) / (2 * E)) < 1e-6 * scale);
      CHECK(std::abs(d.xy - (gy1.phi - gy0.phi) / (2 * E)) < 1e-6 * scale);
      CHECK(d.xx <= -std::abs(d.yy) + 1e-10);
    }
  }
}

TEST_CASE("second derivatives in D3 follow the closed-form table") {
  const double p = 3.0;
  const UWContext& ctx = context(p);
  const double x = 0.05, y = 0.8;
  REQUIRE(classify(ctx, {x, y}) == Region::D3);
  const SecondDerivatives d = u_second_derivs(ctx, {x, y});
  const double q = 1.0 + x - y;
  CHECK(d.xx == doctest::Approx(-4.0 * (1.0 - y) / (q * q * q)).epsilon(1e-12));
  CHECK(d.yy == doctest::Approx(4.0 * x / (q * q * q)).epsilon(1e-12));
}

TEST_CASE("second derivatives are refused on a boundary") {
  const UWContext& ctx = context(3.0);
  // x + 1 - 2/p = |y| is the D1/D3 boundary.
  CHECK_THROWS_AS(u_second_derivs(ctx, {0.1, 0.1 + 1.0 / 3.0}), EvaluationError);
  CHECK_FALSE(is_interior(ctx, {0.1, 0.1 + 1.0 / 3.0}, 1e-6));
}

TEST_CASE("quadratic form is non-positive for |k| <= |h|") {
  const UWContext& ctx = context(3.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ux(0.0, 2.5), uy(-1.6, 1.6), uk(-1.0, 1.0);
  int checked = 0;
  while (checked < 2000) {
    const double x = ux(rng), y = uy(rng);
    if (!is_interior(ctx, {x, y}, 1e-6)) continue;
    ++checked;
    const SecondDerivatives d = u_second_derivs(ctx, {x, y});
    for (int j = 0; j < 100; ++j) CHECK(d.quadratic_form(1.0, uk(rng)) <= 1e-10);
  }
}

TEST_CASE("tangent inequality") {
  const UWContext& ctx = context(3.0);
  CHECK(tangent_check(ctx, 0.0, 0.0, 1.0, 1.0));
  CHECK_THROWS_AS(tangent_check(ctx, 0.0, 0.0, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(tangent_check(ctx, 0.1, 0.0, -0.5, 0.1), std::domain_error);
  for (double p : {2.5, 3.0, 4.0}) {
    const UWContext& c = context(p);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(0.0, 2.5), uy(-1.6, 1.6), uh(-1.0, 1.0), u01(0.0, 1.0);
    int failures = 0;
    for (int i = 0; i < 20000; ++i) {
      const double x = ux(rng), y = uy(rng);
      double h = uh(rng);
      if (x + h < 0.0) h = -x * u01(rng);
      const double k = h * uh(rng);
      if (!tangent_check(c, x, y, h, k)) ++failures;
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("majorization, sign of U_y and symmetry") {
  for (double p : {2.5, 3.0, 4.0}) {
    const UWContext& ctx = context(p);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ux(0.0, 2.5), uy(-1.6, 1.6);
    for (int i = 0; i < 20000; ++i) {
      const double x = ux(rng), y = uy(rng);
      REQUIRE(majorization_check(ctx, {x, y}));
      REQUIRE(u_gradient_ext(ctx, {x, std::abs(y)}).psi >= 0.0);
      const Gradient a = u_gradient_ext(ctx, {x, y}), b = u_gradient_ext(ctx, {x, -y});
      REQUIRE(a.phi == b.phi);
      REQUIRE(a.psi == -b.psi);
    }
  }
}

TEST_CASE("diagonal monotonicity") {
  const UWContext& ctx = context(3.0);
  // A segment inside D7, where phi depends on x alone and psi = 0.
  const std::vector<double> t{0.0, 0.05, 0.1, 0.15, 0.2};
  REQUIRE(classify(ctx, {1.5, -0.3}) == Region::D7);
  REQUIRE(classify(ctx, {1.7, -0.1}) == Region::D7);
  CHECK(diagonal_monotone_check(ctx, 1.5, -0.3, t));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(0.0, 2.5), uy(-0.999, 0.999);
  for (int i = 0; i < 500; ++i) {
    const double x = ux(rng), y = uy(rng);
    const double lo = std::max(-x, -1.0 - y) + 1e-9, hi = std::min(1.0 - y, 2.5 - x) - 1e-9;
    if (!(hi > lo)) continue;
    std::vector<double> grid(40);
    for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = lo + (hi - lo) * static_cast<double>(j) / 39.0;
    CHECK(diagonal_monotone_check(ctx, x, y, grid));
  }
}

TEST_CASE("corner slope gap") {
  for (double p : {2.5, 3.0, 4.0, 6.0}) {
    for (int i = 1; i <= 1000; ++i) CHECK(corner_slope_gap(p, (2.0 / p) * i / 1000.0) >= -1e-14);
    // Its minimum, zero, sits at x = 1/p.
    CHECK(std::abs(corner_slope_gap(p, 1.0 / p)) < 1e-14);
    CHECK(corner_slope_gap(p, 1.0 / p - 1e-3) > 0.0);
    CHECK(corner_slope_gap(p, 1.0 / p + 1e-3) > 0.0);
  }
}

TEST_CASE("branches agree on region boundaries") {
  for (double p : {2.5, 3.0, 4.0}) {
    CAPTURE(p);
    const ContinuityScan scan = scan_continuity(context(p), 500, 1);
    CHECK(scan.worst_gap() < 1e-6);
    CHECK(scan.by_pair.size() >= 8);
    for (const auto& [pair, samples] : scan.by_pair) {
      CHECK(pair.first < pair.second);
      for (const auto& s : samples) {
        REQUIRE(std::hypot(s.on_a.x - s.on_b.x, s.on_a.y - s.on_b.y) < 1e-12);
        REQUIRE(std::hypot(s.on_a.x, std::abs(s.on_a.y) - 1.0) > 1e-3);
      }
    }
  }
}

TEST_CASE("U jumps at (0, 1)") {
  const UWContext& ctx = context(3.0);
  CHECK(u_value(ctx, {0.0, 1.0}) - u_value(ctx, {0.0, 1.0 - 1e-9}) > 0.5);
}

TEST_CASE("boundary trace for plotting") {
  const auto pts = trace_boundaries(context(3.0), 2.0, 1.5, 50);
  REQUIRE(!pts.empty());
  for (const auto& s : pts) {
    CHECK(s.on_a.x >= 0.0);
    CHECK(s.on_a.x <= 2.0);
    CHECK(s.on_a.y >= 0.0);
    CHECK(s.on_a.y <= 1.5);
    CHECK(s.a != s.b);
  }
}

TEST_CASE("evaluation beyond the G table is an error") {
  CHECK_THROWS_AS(classify(context(3.0), {100.0, 0.5}), EvaluationError);
  CHECK_THROWS_AS(UWContext::build(Exponent(1.5)), std::exception);
}
