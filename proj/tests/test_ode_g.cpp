#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "sharpweak/bessel.hpp"
#include "sharpweak/errors.hpp"
#include "sharpweak/ode_g.hpp"

using namespace sharpweak;

TEST_CASE("bessel_i against the long double series and boost") {
  for (double a : {-0.75, -0.5, 0.0, 0.25, 1.0 / 3.0, 0.5, 1.5, 2.0}) {
    for (double z : {1e-3, 0.1, 0.5, 1.0, 3.0, 7.5, 15.0, 24.0}) {
      CAPTURE(a);
      CAPTURE(z);
      const double ref = oracle::bessel_i_series(a, z);
      CHECK(std::abs(bessel_i(a, z) / ref - 1.0) < 1e-13);
      CHECK(std::abs(bessel_i(a, z) / boost::math::cyl_bessel_i(a, z) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("scaled bessel beyond the series range") {
  for (double a : {-0.5, 0.25, 1.0, 2.5}) {
    for (double z : {26.0, 40.0, 100.0, 500.0}) {
      CAPTURE(a);
      CAPTURE(z);
      const double ref = boost::math::cyl_bessel_i(a, z) * std::exp(-z);
      CHECK(std::abs(bessel_i_scaled(a, z) / ref - 1.0) < 1e-12);
    }
  }
  // Continuity at the switch from series to asymptotics.
  for (double a : {-0.5, 0.75}) {
    CHECK(std::abs(bessel_i_scaled(a, 25.0 - 1e-9) / bessel_i_scaled(a, 25.0 + 1e-9) - 1.0) < 1e-10);
  }
}

TEST_CASE("bessel_i solves the modified Bessel equation") {
  for (double a : {-0.6, 0.3, 1.2}) {
    for (double z : {0.5, 2.0, 6.0}) {
      const double e = 1e-3;
      const double w = bessel_i(a, z);
      const double w1 = (bessel_i(a, z + e) - bessel_i(a, z - e)) / (2.0 * e);
      const double w2 = (bessel_i(a, z + e) - 2.0 * w + bessel_i(a, z - e)) / (e * e);
      const double res = z * z * w2 + z * w1 - (z * z + a * a) * w;
      CHECK(std::abs(res) < 1e-5 * (1.0 + std::abs(w) * z * z));
    }
  }
}

TEST_CASE("scaled derivative matches the recurrence and differences") {
  for (double a : {-0.5, 0.4, 2.0}) {
    for (double z : {0.7, 5.0, 30.0}) {
      const double e = 1e-5 * z;
      const double fd =
          (bessel_i_scaled(a, z + e) * std::exp(e) - bessel_i_scaled(a, z - e) * std::exp(-e)) / (2.0 * e);
      CHECK(std::abs(bessel_i_prime_scaled(a, z) - fd) < 1e-7 * std::abs(fd));
    }
  }
}

TEST_CASE("right-hand side at the starting point") {
  for (double p : {2.5, 3.0, 4.0, 6.0}) {
    CHECK(std::abs(g_rhs(p, 2.0 / p, 1.0) - p / 2.0) < 1e-14 * p);
  }
}

TEST_CASE("RK and Bessel tables agree and satisfy the ODE") {
  for (double p : {2.5, 3.0, 4.0, 6.0}) {
    CAPTURE(p);
    const double t_max = std::max(10.0, default_t_max(p));
    const GSolution rk = build_g_rk(Exponent(p), t_max);
    const GSolution bes = build_g_bessel(Exponent(p), t_max);
    double diff = 0.0;
    for (std::size_t i = 0; i < rk.grid().size(); ++i) {
      if (rk.grid()[i] <= 10.0) diff = std::max(diff, std::abs(rk.values()[i] - bes.values()[i]));
    }
    CHECK(diff < 1e-6);
    CHECK(ode_residual(rk) < 1e-8);
    CHECK(ode_residual(bes) < 1e-8);
    for (double gp : rk.derivatives()) REQUIRE(gp >= 1.0);
    CHECK_NOTHROW(rk.check_invariants());
    CHECK(rk.value(2.0 / p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rk.derivative(2.0 / p) == doctest::Approx(p / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("closed-form derivative against differences of the closed form") {
  for (double p : {2.5, 3.0, 6.0}) {
    const BesselLinearization lin(p);
    for (double t : {2.0 / p + 0.01, 1.0, 3.0, 8.0}) {
      const double e = 1e-5;
      const double fd = (lin.g(t + e) - lin.g(t - e)) / (2.0 * e);
      CHECK(std::abs(lin.g_prime(t) - fd) < 1e-8);
    }
  }
}

TEST_CASE("halving the step moves G by less than 1e-9") {
  for (double p : {2.5, 3.0, 4.0, 6.0}) {
    CAPTURE(p);
    const GSolution a = build_g_rk(Exponent(p), 10.0);
    const GSolution b = build_g_rk(Exponent(p), 10.0, 5e-4);
    double worst = 0.0;
    for (double t : a.grid()) worst = std::max(worst, std::abs(a.value(t) - b.value(t)));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("interpolation between nodes") {
  const double p = 3.0;
  const GSolution rk = build_g_rk(Exponent(p), 10.0);
  const BesselLinearization lin(p);
  for (double t = 2.0 / p + 3.7e-4; t < 10.0; t += 0.0123) {
    CHECK(std::abs(rk.value(t) - lin.g(t)) < 1e-9);
    CHECK(std::abs(rk.derivative(t) - lin.g_prime(t)) < 1e-7);
  }
  CHECK_THROWS_AS(rk.value(10.5), std::domain_error);
  CHECK_THROWS_AS(rk.value(0.1), std::domain_error);
}

TEST_CASE("h inverts G") {
  for (double p : {2.5, 3.0, 6.0}) {
    CAPTURE(p);
    const HSolution h(std::make_shared<const GSolution>(build_g_rk(Exponent(p), default_t_max(p))));
    CHECK(h_of(h, 1.0) == 2.0 / p);
    for (double s = 1.0 + 1e-3; s < h.s_max(); s += 0.0371) {
      const double hs = h_of(h, s);
      CHECK(std::abs(h.g().value(hs) - s) < 1e-10);
      CHECK(hs > s - 1.0);
      const double hp = h_prime(h, s);
      CHECK(hp > 0.0);
      CHECK(hp <= 1.0);
      if (s + 1e-5 < h.s_max()) {
        const double fd = (h_of(h, s + 1e-5) - h_of(h, s - 1e-5)) / 2e-5;
        CHECK(std::abs(hp - fd) < 1e-6);
      }
    }
    CHECK_THROWS_AS(h_of(h, 0.5), std::domain_error);
    CHECK_THROWS_AS(h_of(h, h.s_max() + 1.0), std::domain_error);
  }
}

TEST_CASE("construction arguments") {
  CHECK_THROWS_AS(build_g_rk(Exponent(2.0), 10.0), std::domain_error);
  CHECK_THROWS_AS(build_g_rk(Exponent(3.0), 0.5), std::domain_error);
  CHECK_THROWS_AS(build_g_rk(Exponent(3.0), 10.0, 1e-2), std::domain_error);
  CHECK_THROWS_AS(build_g_bessel(Exponent(1.5), 10.0), std::domain_error);
  CHECK(default_t_max(3.0) >= 10.0);
}

TEST_CASE("CSV export") {
  const GSolution rk = build_g_rk(Exponent(3.0), 1.0);
  std::ostringstream os;
  rk.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,G,Gprime");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == static_cast<int>(rk.grid().size()));
}
