#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sharpweak/atomic.hpp"
#include "sharpweak/errors.hpp"
#include "sharpweak/extremal.hpp"

using namespace sharpweak;

namespace {

// Terminal distribution of the p > 2 chain written out by hand, without the
// split tree: the left atom [0, p_{2n}] carries X_{2n} = x0 (1 + 2 delta/p)^n
// and everything split off it is frozen.
struct ChainOracle {
  double prob = 0.0;
  double moment = 0.0;
};

ChainOracle chain_oracle(double p, double x0, double delta, int n_steps) {
  const double r = (p - p * delta + 4 * delta) / ((p + 2 * delta) * (1 + delta));
  ChainOracle out;
  double x = x0, y = (p - 1) * x0, len = 1.0;
  auto add = [&](double length, double xv, double yv) {
    out.moment += length * std::pow(std::abs(xv), p);
    if (yv >= 1.0 - 1e-9) out.prob += length;
  };
  for (int n = 0; n < n_steps; ++n) {
    const double odd = len / (1 + delta);
    const double next = len * r;
    add(len - odd, 0.0, y - x);
    add(odd - next, (2 + 4 * delta / p) * x, y + delta * x - (1 + 4 * delta / p - delta) * x);
    y += delta * x + (1 - 2 / p) * delta * x;
    x *= 1 + 2 * delta / p;
    len = next;
  }
  add(len / 2, 2 * x, y + x);
  add(len / 2, 0.0, y - x);
  return out;
}

}  // namespace

TEST_CASE("atomic martingale basics") {
  AtomicMartingale f(1.0);
  const Refinement r0{0, {{0.0, 0.25, 3.0}, {0.25, 1.0, 1.0 / 3.0}}};
  f.add_step(std::span<const Refinement>(&r0, 1));
  CHECK(f.steps() == 2);
  CHECK(f.value_at(0, 0.9) == 1.0);
  CHECK(f.value_at(1, 0.1) == 3.0);
  CHECK(f.value_at(1, 0.9) == doctest::Approx(1.0 / 3.0));
  CHECK(f.expectation(1, [](double v) { return v; }) == doctest::Approx(1.0));
  CHECK(f.check_martingale().ok);
  CHECK(f.check_nested());
  CHECK(strong_norm(f, 1.0) == doctest::Approx(1.0));
  CHECK(strong_norm(f, 2.0) == doctest::Approx(std::sqrt(0.25 * 9 + 0.75 / 9.0)));
  // f* = 3 on [0, 1/4], 1 elsewhere: sup of 3 * (1/4)^{1/p} and 1.
  CHECK(weak_norm(f, 1.0) == doctest::Approx(1.0));
  CHECK(weak_norm(f, 0.5) == doctest::Approx(1.0));
  CHECK(weak_norm(f, 2.0) == doctest::Approx(1.5));
  const auto run = running_abs_max(f, 1);
  REQUIRE(run.size() == 2);
  CHECK(run[1].value == 1.0);

  const AtomicMartingale g = f.affine(-1.0, 2.0);
  CHECK(g.value_at(1, 0.1) == -1.0);
  CHECK(g.check_martingale().ok);
}

TEST_CASE("atomic martingale rejects bad refinements") {
  AtomicMartingale f(0.0);
  const Refinement gap{0, {{0.0, 0.4, 1.0}, {0.5, 1.0, -1.0}}};
  CHECK_THROWS_AS(f.add_step(std::span<const Refinement>(&gap, 1)), ConstructionError);
  const Refinement dead{3, {{0.0, 1.0, 0.0}}};
  CHECK_THROWS_AS(f.add_step(std::span<const Refinement>(&dead, 1)), ConstructionError);
  const Refinement ok{0, {{0.0, 0.5, 1.0}, {0.5, 1.0, -1.0}}};
  const Refinement twice[] = {ok, ok};
  CHECK_THROWS_AS(f.add_step(twice), ConstructionError);
  // A split that moves the mean is stored but flagged.
  const Refinement biased{0, {{0.0, 0.5, 1.0}, {0.5, 1.0, 0.0}}};
  f.add_step(std::span<const Refinement>(&biased, 1));
  CHECK_FALSE(f.check_martingale().ok);
}

TEST_CASE("three-step parameters at x0 = 1/24") {
  const ExtremalParams prm = resolve_params(3.0, 1.0 / 24.0, 1.5);
  CHECK(prm.n_steps == 3);
  CHECK(prm.delta == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(prm.residual() < 1e-12);
}

TEST_CASE("delta bisection matches the closed form") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> up(2.1, 8.0), uf(0.01, 0.9), ud(1e-3, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double p = up(rng);
    const double x0 = uf(rng) / p;
    const ExtremalParams prm = resolve_params(p, x0, ud(rng));
    CAPTURE(p);
    CAPTURE(x0);
    CHECK(prm.n_steps >= 1);
    CHECK(prm.delta == doctest::Approx(delta_closed_form(p, x0, prm.n_steps)).epsilon(1e-9));
    CHECK(prm.residual() <= 1e-12);
  }
  CHECK_THROWS_AS(resolve_params(2.0, 0.1, 0.5), ParameterError);
  CHECK_THROWS_AS(resolve_params(3.0, 0.5, 0.5), ParameterError);
  CHECK_THROWS_AS(resolve_params(3.0, 0.1, 0.0), ParameterError);
}

TEST_CASE("weights decrease geometrically") {
  const ExtremalParams prm = resolve_params(4.0, 0.05, 0.2);
  const auto w = extremal_weights(prm);
  REQUIRE(w.size() == static_cast<size_t>(2 * prm.n_steps + 1));
  CHECK(w[0] == doctest::Approx(1.0));
  const double r = (4.0 - 4.0 * prm.delta + 4 * prm.delta) / ((4.0 + 2 * prm.delta) * (1 + prm.delta));
  for (size_t i = 1; i < w.size(); ++i) CHECK(w[i] < w[i - 1]);
  for (int n = 0; n < prm.n_steps; ++n) {
    CHECK(w[2 * n] == doctest::Approx(std::pow(r, n)).epsilon(1e-12));
    CHECK(w[2 * n + 1] == doctest::Approx(w[2 * n] / (1 + prm.delta)).epsilon(1e-12));
  }
}

TEST_CASE("chain is a martingale pair with |dY| = |dX|") {
  for (double p : {2.5, 3.0, 5.0}) {
    CAPTURE(p);
    const ExtremalChain ch = build_extremal_chain(resolve_params(p, 0.02, 0.05));
    CHECK(ch.x.check_martingale().ok);
    CHECK(ch.y.check_martingale().ok);
    CHECK(ch.x.check_nested());
    const auto signs = primed_transform_signs(ch);
    for (int v : signs) CHECK((v == 1 || v == -1));
    CHECK(ch.x.value_at(0, 0.5) == doctest::Approx(0.02));
    CHECK(ch.y.value_at(0, 0.5) == doctest::Approx((p - 1) * 0.02));
  }
}

TEST_CASE("ratio agrees with the hand-written chain") {
  for (double p : {2.5, 3.0, 4.0}) {
    for (double delta : {0.5, 0.05, 0.005}) {
      CAPTURE(p);
      CAPTURE(delta);
      const ExtremalParams prm = resolve_params(p, 0.03, delta);
      const RatioReport rep = evaluate_ratio(build_extremal_chain(prm));
      const ChainOracle o = chain_oracle(p, prm.x0, prm.delta, prm.n_steps);
      CHECK(rep.prob == doctest::Approx(o.prob).epsilon(1e-10));
      CHECK(rep.moment == doctest::Approx(o.moment).epsilon(1e-10));
      CHECK(rep.prob > 0.0);
      CHECK(rep.ratio <= rep.limit * (1 + 1e-9));
      const double c = 1 - (p - 2) * prm.x0;
      CHECK(rep.primed_moment == doctest::Approx(o.moment / std::pow(c, p)).epsilon(1e-10));
      CHECK(rep.sharp_constant == doctest::Approx(std::pow(p, p) / (std::pow(2.0, p) * (p - 1))));
    }
  }
}

TEST_CASE("primed ratio approaches the sharp constant") {
  for (double delta : {1e-3, 5e-4}) {
    CAPTURE(delta);
    const RatioReport rep = evaluate_ratio(build_extremal_chain(resolve_params(3.0, 1e-2, delta)));
    CHECK(std::abs(rep.primed_ratio / rep.sharp_constant - 1.0) < 0.02);
  }
}

TEST_CASE("p < 1 example has weak norm exactly twice the strong norm") {
  const PLt1Example ex = build_p_lt1_example();
  CHECK(ex.f.check_martingale().ok);
  CHECK(ex.g.check_martingale().ok);
  for (int i = 1; i <= 9; ++i) {
    const double p = 0.1 * i;
    CAPTURE(p);
    const PLt1Report rep = p_lt1_report(ex, p);
    // f_1 is 0 on [0, 3/4] and 2 on (3/4, 1]; g_1 is +-1, so g* = 1.
    CHECK(rep.f1_norm == doctest::Approx(2.0 * std::pow(0.25, 1.0 / p)));
    CHECK(rep.f_norm == 0.5);
    CHECK(rep.g_weak_norm == 1.0);
    CHECK(rep.identity_exact);
  }
}

TEST_CASE("harmonic one-dimensional example") {
  CHECK(exit_probability_right(-1.0, 3.0, 0.0) == doctest::Approx(0.25));
  CHECK(exit_probability_right(-1.0, 1.0, 0.0) == doctest::Approx(0.5));
  std::vector<double> grid;
  for (int i = 1; i < 200; ++i) grid.push_back(0.01 * i);
  grid.push_back(2.0 - 1e-7);
  for (double p : {0.25, 0.5, 0.9}) {
    CAPTURE(p);
    const HarmonicReport rep = harmonic_1d_example(p, grid);
    CHECK(rep.u_norm == 1.0);
    CHECK(rep.sup_value <= 2.0);
    CHECK(rep.sup_value > 2.0 - 1e-6);
    for (const auto& pt : rep.points) {
      CHECK(pt.a < 0.0);
      CHECK(pt.b > 0.0);
      CHECK(pt.mu <= 1.0);
    }
  }
  const double bad[] = {2.0};
  CHECK_THROWS_AS(harmonic_1d_example(0.5, bad), std::domain_error);
  const double fine[] = {1.0};
  CHECK_THROWS_AS(harmonic_1d_example(1.5, fine), std::domain_error);
}

TEST_CASE("trajectory CSV") {
  const ExtremalChain ch = build_extremal_chain(resolve_params(3.0, 1.0 / 24.0, 1.5));
  const AtomicMartingale* procs[] = {&ch.x, &ch.y};
  const char* names[] = {"X", "Y"};
  std::ostringstream os;
  write_trajectories_csv(os, procs, names);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "step,lo,hi,X,Y");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows > 2 * 3 + 1);
  const char* one[] = {"X"};
  CHECK_THROWS(write_trajectories_csv(os, procs, one));
}
