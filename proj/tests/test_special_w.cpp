#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "sharpweak/special_w.hpp"

using namespace sharpweak;

TEST_CASE("values") {
  CHECK(w_value({0.0, 0.0}) == 0.0);
  CHECK(w_value({1.0, 0.0}) == 1.0);
  CHECK(w_value({0.25, 0.25}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w_value({0.6, 0.5}) == 1.0);
  CHECK(w_value({3.0, -7.0}) == 1.0);
}

TEST_CASE("negative x is rejected") { CHECK_THROWS_AS(HalfPlanePoint(-0.1, 0.0), std::domain_error); }

TEST_CASE("extended gradient") {
  const Gradient g0 = w_gradient_ext({0.0, 0.0});
  CHECK(g0.phi == 2.0);
  CHECK(g0.psi == 0.0);
  const Gradient g1 = w_gradient_ext({2.0, 0.0});
  CHECK(g1.phi == 0.0);
  CHECK(g1.psi == 0.0);
  const Gradient g2 = w_gradient_ext({0.5, -0.3});
  CHECK(g2.phi == doctest::Approx(1.0));
  CHECK(g2.psi == doctest::Approx(-0.6));
  // On the cap boundary the inner formulas apply.
  const Gradient g3 = w_gradient_ext({0.25, 0.75});
  CHECK(g3.phi == doctest::Approx(1.5));
  CHECK(g3.psi == doctest::Approx(1.5));
}

TEST_CASE("gradient matches differences off the cap boundary") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.01, 2.0), uy(-2.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = ux(rng), y = uy(rng);
    if (std::abs(x + std::abs(y) - 1.0) < 1e-3) continue;
    const double e = 1e-6;
    const Gradient g = w_gradient_ext({x, y});
    CHECK(std::abs(g.phi - (w_value({x + e, y}) - w_value({x - e, y})) / (2 * e)) < 1e-6);
    CHECK(std::abs(g.psi - (w_value({x, y + e}) - w_value({x, y - e})) / (2 * e)) < 1e-6);
  }
}

TEST_CASE("tangent inequality examples") {
  CHECK(w_tangent_check(0.3, 0.1, 0.1, 0.1));
  CHECK(w_tangent_check(0.0, 0.0, 0.0, 0.0));
  CHECK_THROWS_AS(w_tangent_check(0.2, 0.0, -0.3, 0.0), std::domain_error);
  CHECK_THROWS_AS(w_tangent_check(0.2, 0.0, 0.1, 0.2), std::domain_error);
}

TEST_CASE("tangent inequality needs the dominated jump to be the smaller one") {
  // x = y = h = 0, k = 1/2: W(0, 1/2) = 1/4 but the tangent plane gives 0.
  const Gradient g = w_gradient_ext({0.0, 0.0});
  CHECK(w_value({0.0, 0.5}) > w_value({0.0, 0.0}) + g.phi * 0.0 + g.psi * 0.5);
}

TEST_CASE("tangent inequality on random tuples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 2.0), uy(-2.0, 2.0), uh(-1.5, 1.5), u01(0.0, 1.0), upm(-1.0, 1.0);
  int failures = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = ux(rng), y = uy(rng);
    double h = uh(rng);
    if (x + h < 0.0) h = -x * u01(rng);
    const double k = h * upm(rng);
    if (!w_tangent_check(x, y, h, k)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("bounds") {
  CHECK(w_bounds_check({0.6, 0.5}, 0.5));
  CHECK(w_value({0.4, 0.4}) == doctest::Approx(0.8));
  CHECK(w_bounds_check({0.4, 0.4}, 0.5));
  CHECK(w_value({0.4, 0.4}) <= std::pow(0.8, 0.5));
  for (int i = 1; i <= 9; ++i) {
    const double p = i / 10.0;
    for (double x = 0.0; x < 0.5; x += 0.001) {
      CAPTURE(p);
      CAPTURE(x);
      CHECK(w_bounds_check({x, x}, p));
      // Reduced form on the diagonal: 2x 1{2x < 1} + 1{2x >= 1} <= (2x)^p.
      CHECK((2.0 * x < 1.0 ? 2.0 * x : 1.0) <= std::pow(2.0 * x, p) + 1e-15);
    }
  }
  CHECK_THROWS_AS(w_bounds_check({0.4, 0.1}, 1.5), std::domain_error);
}

TEST_CASE("continuity across the cap and evenness") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0), uy(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    const double y = 1.0 - x;
    const double inner = 2.0 * x - x * x + y * y;
    CHECK(std::abs(inner - 1.0) < 1e-12);
    CHECK(std::abs(w_value({x, y}) - w_value({x + 1e-13, y})) < 1e-12);
    const double yy = uy(rng);
    CHECK(w_value({x, yy}) == w_value({x, -yy}));
  }
}
