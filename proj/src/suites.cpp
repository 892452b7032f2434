#include "sharpweak/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sharpweak/constants.hpp"
#include "sharpweak/errors.hpp"
#include "sharpweak/extremal.hpp"
#include "sharpweak/ode_g.hpp"
#include "sharpweak/special_u_orth.hpp"
#include "sharpweak/special_u_weak.hpp"
#include "sharpweak/special_w.hpp"

#ifndef SHARPWEAK_VERSION
#define SHARPWEAK_VERSION "0.0.0"
#endif

namespace sharpweak {

Property::Property(std::string name_, double tolerance_)
    : name(std::move(name_)), worst_margin(std::numeric_limits<double>::infinity()), tolerance(tolerance_) {}

void Property::record(double margin) {
  ++samples;
  if (std::isnan(margin)) {
    ++violations;
    worst_margin = margin;
    return;
  }
  if (!std::isnan(worst_margin)) worst_margin = std::min(worst_margin, margin);
  if (margin < -tolerance) ++violations;
}

void Property::record_failure(const std::string& why) {
  ++samples;
  ++violations;
  if (note.empty()) note = why;
}

std::string artifact_version() { return SHARPWEAK_VERSION; }

RunManifest make_manifest(std::string command, std::vector<std::pair<std::string, std::string>> parameters,
                          std::uint64_t seed) {
  RunManifest m;
  m.command = std::move(command);
  m.parameters = std::move(parameters);
  m.seed = seed;
  m.artifact_version = artifact_version();
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  m.timestamp = buf;
  return m;
}

bool SuiteReport::passed() const {
  for (const auto& prop : properties) {
    if (!prop.passed()) return false;
  }
  for (const auto& s : statistics) {
    if (s.verdict == Verdict::Fail) return false;
  }
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double pick_p(const SuiteOptions& o, double fallback) { return o.p.value_or(fallback); }
long pick_n(const SuiteOptions& o, long fallback) {
  const long n = o.n.value_or(fallback);
  if (n < 1) throw ParameterError("--n must be >= 1");
  return n;
}

SimConfig sim_config(const SuiteOptions& o, long n) {
  SimConfig cfg;
  cfg.master_seed = o.seed;
  cfg.n_samples = n;
  cfg.dt = o.dt;
  cfg.dt_min = std::min(cfg.dt_min, o.dt);
  cfg.workers = o.workers;
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------

SuiteReport suite_w(const SuiteOptions& o) {
  const double p = pick_p(o, 0.5);
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("suite w needs 0 < p < 1");
  const long n = pick_n(o, 100000);
  std::mt19937_64 rng(o.seed);
  SuiteReport r;
  r.p = p;

  Property tangent("tangent_inequality", 1e-12);
  for (long i = 0; i < n; ++i) {
    const double x = uniform(rng, 0.0, 2.0);
    const double y = uniform(rng, -2.0, 2.0);
    double h = uniform(rng, -1.5, 1.5);
    if (x + h < 0.0) h = -x * uniform(rng, 0.0, 1.0);
    const double k = h * uniform(rng, -1.0, 1.0);
    const Gradient g = w_gradient_ext({x, y});
    const double margin = w_value({x, y}) + g.phi * h + g.psi * k - w_value({x + h, y + k});
    if (!w_tangent_check(x, y, h, k)) {
      tangent.record(std::min(margin, -2.0 * tangent.tolerance));
    } else {
      tangent.record(margin);
    }
  }

  Property lower("indicator_lower_bound", 1e-12);
  Property upper("power_upper_bound", 1e-12);
  Property symmetric("even_in_y", 0.0);
  for (long i = 0; i < n; ++i) {
    const double x = uniform(rng, 0.0, 2.0);
    const double y = uniform(rng, -2.0, 2.0);
    const double w = w_value({x, y});
    lower.record(w - (x + std::abs(y) >= 1.0 ? 1.0 : 0.0));
    symmetric.record(-std::abs(w - w_value({x, -y})));
    const double d = uniform(rng, -1.0, 1.0) * x;  // |d| <= x
    const double wd = w_value({x, d});
    const bool ok = w_bounds_check({x, d}, p);
    upper.record(ok ? std::pow(2.0 * x, p) - wd : std::min(std::pow(2.0 * x, p) - wd, -1.0));
  }

  Property continuity("continuity_across_cap", 1e-12);
  for (long i = 0; i < std::min<long>(n, 20000); ++i) {
    const double x = uniform(rng, 0.0, 1.0);
    const double ay = 1.0 - x;
    const double y = (i % 2 == 0) ? ay : -ay;
    const double sgn = (y >= 0.0) ? 1.0 : -1.0;
    const double inside = 2.0 * x - x * x + ay * ay;
    const double outside = w_value({x + 1e-15, y + sgn * 1e-15});
    continuity.record(-std::abs(inside - outside));
  }

  r.properties = {tangent, lower, upper, symmetric, continuity};
  return r;
}

// ---------------------------------------------------------------------------

SuiteReport suite_u_weak(const SuiteOptions& o) {
  const double p = pick_p(o, 3.0);
  if (!(p > 2.0)) throw ParameterError("suite u-weak needs p > 2");
  const long n = pick_n(o, 100000);
  const UWContext ctx = UWContext::build(Exponent(p));
  std::mt19937_64 rng(o.seed);
  SuiteReport r;
  r.p = p;

  const double x_max = 2.5;
  const double y_max = 1.6;

  Property tangent("tangent_inequality", 1e-9);
  for (long i = 0; i < n; ++i) {
    const double x = uniform(rng, 0.0, x_max);
    const double y = uniform(rng, -y_max, y_max);
    double h = uniform(rng, -1.0, 1.0);
    if (x + h < 0.0) h = -x * uniform(rng, 0.0, 1.0);
    const double k = h * uniform(rng, -1.0, 1.0);
    try {
      const Gradient g = u_gradient_ext(ctx, {x, y});
      const double margin = u_value(ctx, {x, y}) + g.phi * h + g.psi * k - u_value(ctx, {x + h, y + k});
      tangent.record(tangent_check(ctx, x, y, h, k) ? margin : std::min(margin, -2.0 * tangent.tolerance));
    } catch (const std::exception& e) {
      tangent.record_failure(e.what());
    }
  }

  Property form("hessian_form_nonpositive", 1e-10);
  Property diag("uxx_le_minus_abs_uyy", 1e-10);
  long skipped = 0;
  for (long i = 0; i < n;) {
    const double x = uniform(rng, 0.0, x_max);
    const double y = uniform(rng, -y_max, y_max);
    const HalfPlanePoint pt(x, y);
    if (!is_interior(ctx, pt, 1e-6)) {
      ++skipped;
      continue;
    }
    ++i;
    try {
      const SecondDerivatives d = u_second_derivs(ctx, pt);
      const double h = (rng() & 1u) ? 1.0 : -1.0;
      const double k = uniform(rng, -1.0, 1.0);
      form.record(-d.quadratic_form(h, k));
      diag.record(-(d.xx + std::abs(d.yy)));
    } catch (const std::exception& e) {
      form.record_failure(e.what());
      diag.record_failure(e.what());
    }
  }
  form.note = "points within 1e-6 of a boundary skipped: " + std::to_string(skipped);

  Property monotone("diagonal_monotone", 1e-9);
  const long n_diag = std::max<long>(1, n / 25);
  for (long i = 0; i < n_diag; ++i) {
    const double x = uniform(rng, 0.0, x_max);
    const double y = uniform(rng, -0.999, 0.999);
    const double lo = std::max(-x, -1.0 - y) + 1e-9;
    const double hi = std::min(1.0 - y, x_max - x) - 1e-9;
    if (!(hi > lo)) {
      --i;
      continue;
    }
    std::vector<double> t(25);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = lo + (hi - lo) * static_cast<double>(j) / 24.0;
    try {
      double margin = std::numeric_limits<double>::infinity();
      double prev = 0.0;
      for (std::size_t j = 0; j < t.size(); ++j) {
        const Gradient g = u_gradient_ext(ctx, {x + t[j], y + t[j]});
        const double v = g.phi - g.psi;
        if (j > 0) margin = std::min(margin, prev - v);
        prev = v;
      }
      const bool ok = diagonal_monotone_check(ctx, x, y, t);
      monotone.record(ok ? margin : std::min(margin, -2.0 * monotone.tolerance));
    } catch (const std::exception& e) {
      monotone.record_failure(e.what());
    }
  }

  Property major("majorizes_v", 1e-10);
  Property diagonal_value("nonpositive_on_diagonals", 1e-12);
  Property psi_sign("u_y_nonnegative_upper_half", 1e-12);
  Property symmetric("even_in_y", 1e-15);
  for (long i = 0; i < n; ++i) {
    const double x = uniform(rng, 0.0, x_max);
    const double y = uniform(rng, -y_max, y_max);
    try {
      const double u = u_value(ctx, {x, y});
      const double margin = u - v_value(ctx, {x, y});
      major.record(majorization_check(ctx, {x, y}) ? margin : std::min(margin, -1.0));
      const double xd = uniform(rng, 0.0, 1.0 / 2.0);
      diagonal_value.record(-std::max(u_value(ctx, {xd, xd}), u_value(ctx, {xd, -xd})));
      psi_sign.record(u_gradient_ext(ctx, {x, std::abs(y)}).psi);
      symmetric.record(-std::abs(u - u_value(ctx, {x, -y})));
    } catch (const std::exception& e) {
      major.record_failure(e.what());
    }
  }

  Property gradient("gradient_matches_differences", 1e-5);
  const double fd = 1e-6;
  for (long i = 0; i < std::min<long>(n, 20000);) {
    const double x = uniform(rng, 2e-3, x_max);
    const double y = uniform(rng, -y_max, y_max);
    const HalfPlanePoint pt(x, y);
    if (!is_interior(ctx, pt, 1e-3)) continue;
    ++i;
    const Gradient g = u_gradient_ext(ctx, pt);
    const double ux = (u_value(ctx, {x + fd, y}) - u_value(ctx, {x - fd, y})) / (2.0 * fd);
    const double uy = (u_value(ctx, {x, y + fd}) - u_value(ctx, {x, y - fd})) / (2.0 * fd);
    gradient.record(-std::max(std::abs(g.phi - ux), std::abs(g.psi - uy)));
  }

  Property corner("corner_slope_gap_nonnegative", 1e-14);
  for (int i = 1; i <= 1000; ++i) corner.record(corner_slope_gap(p, (2.0 / p) * i / 1000.0));

  const int per_pair = static_cast<int>(std::max<long>(1, n / 10));
  const ContinuityScan scan = scan_continuity(ctx, per_pair, o.seed);
  Property continuity("branch_continuity", 1e-6);
  std::size_t fewest = std::numeric_limits<std::size_t>::max();
  for (const auto& [pair, samples] : scan.by_pair) {
    fewest = std::min(fewest, samples.size());
    for (const auto& s : samples) continuity.record(-s.gap);
  }
  continuity.note = std::to_string(scan.by_pair.size()) + " region pairs, at least " +
                    std::to_string(scan.by_pair.empty() ? 0 : fewest) + " samples each";

  r.properties = {tangent, form, diag, monotone, major, diagonal_value, psi_sign, symmetric, gradient, corner,
                  continuity};
  return r;
}

// ---------------------------------------------------------------------------

SuiteReport suite_u_orth(const SuiteOptions& o) {
  const double p = pick_p(o, 1.5);
  if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("suite u-orth needs 1 <= p <= 2");
  const long n = pick_n(o, 200);
  const OrthContext ctx(Exponent(p, Regime::OrthRange));
  SuiteReport r;
  r.p = p;

  const OrthReport base = orth_property_suite(ctx, static_cast<int>(std::min<long>(n, 1000000)), o.seed);
  for (const auto& c : base.checks) {
    Property prop(c.name, c.tolerance);
    prop.samples = c.samples;
    prop.violations = c.violations;
    prop.worst_margin = c.worst_margin;
    r.properties.push_back(prop);
  }

  Property origin("origin_times_kpp_is_one", 1e-6);
  origin.record(-std::abs(u_orth(ctx, 0.0, 0.0) * ctx.kpp() - 1.0));
  r.properties.push_back(origin);

  if (p == 2.0) {
    Property closed("closed_form_p2", 1e-6);
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 19; ++j) {
        const double x = -2.0 + 0.2 * i;
        const double y = -0.95 + 0.1 * j;
        closed.record(-std::abs(u_orth(ctx, x, y) - (x * x + 1.0 - y * y)));
      }
    }
    r.properties.push_back(closed);
  }

  // Near |y| = 1 the value approaches |x|^p at a rate linear in the distance.
  Property edge("edge_gap_linear", 0.0);
  for (double d : {1e-3, 1e-4, 1e-6}) {
    for (double x : {0.0, 0.5, 1.5}) {
      edge.record(20.0 * d - std::abs(u_orth(ctx, x, 1.0 - d) - std::pow(std::abs(x), p)));
    }
  }
  r.properties.push_back(edge);

  Property scalar("scalar_inequality", 1e-12);
  std::mt19937_64 rng(o.seed);
  for (long i = 0; i < std::max<long>(n, 10000); ++i) {
    const double x = uniform(rng, -3.0, 3.0);
    const double h = uniform(rng, -3.0, 3.0);
    const double rhs = 2.0 * std::pow(std::abs(x), p) + 2.0 * std::pow(std::abs(h), p);
    const double margin = rhs - std::pow(std::abs(x + h), p) - std::pow(std::abs(x - h), p);
    scalar.record(scalar_inequality_check(Exponent(p, Regime::OrthRange), x, h) ? std::max(margin, 0.0)
                                                                                  : std::min(margin, -1.0));
  }
  r.properties.push_back(scalar);
  return r;
}

// ---------------------------------------------------------------------------

SuiteReport suite_ode(const SuiteOptions& o) {
  const double p = pick_p(o, 3.0);
  if (!(p > 2.0)) throw ParameterError("suite ode needs p > 2");
  SuiteReport r;
  r.p = p;
  const double t_max = std::max(10.0, default_t_max(p));
  const GSolution rk = build_g_rk(Exponent(p), t_max);
  const GSolution bes = build_g_bessel(Exponent(p), t_max);
  const GSolution fine = build_g_rk(Exponent(p), t_max, 5e-4);

  Property agree("rk_vs_bessel", 1e-6);
  Property refine("step_halving", 1e-9);
  Property monotone("g_increasing", 0.0);
  Property below("g_below_t_plus_1", 0.0);
  Property slope("g_prime_at_least_one", 0.0);
  const auto t = rk.grid();
  const auto g = rk.values();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= 10.0) agree.record(-std::abs(g[i] - bes.values()[i]));
    refine.record(-std::abs(g[i] - fine.value(t[i])));
    if (i > 0) monotone.record(g[i] - g[i - 1]);
    below.record(t[i] + 1.0 - g[i]);
    slope.record(rk.derivatives()[i] - 1.0);
  }
  Property residual_rk("residual_rk_table", 1e-8);
  residual_rk.record(-ode_residual(rk));
  Property residual_bes("residual_bessel_table", 1e-8);
  residual_bes.record(-ode_residual(bes));
  agree.note = "max |G_rk - G_bessel| = " + fmt(-agree.worst_margin);

  const HSolution h(std::make_shared<const GSolution>(rk));
  Property roundtrip("h_inverts_g", 1e-10);
  Property h_above("h_above_s_minus_1", 0.0);
  Property h_slope("h_prime_in_unit_interval", 0.0);
  for (int i = 1; i <= 2000; ++i) {
    const double s = 1.0 + (h.s_max() - 1.0) * i / 2001.0;
    const double hs = h_of(h, s);
    roundtrip.record(-std::abs(rk.value(hs) - s));
    h_above.record(hs - (s - 1.0));
    const double hp = h_prime(h, s);
    h_slope.record(std::min(hp, 1.0 - hp));
  }
  r.properties = {agree, residual_rk, residual_bes, slope, monotone, below, refine, roundtrip, h_above, h_slope};
  return r;
}

// ---------------------------------------------------------------------------

void check_chain(const ExtremalChain& chain, Property& mart, Property& nested, Property& transform) {
  for (const AtomicMartingale* m : {&chain.x, &chain.y}) {
    const MartingaleCheck c = m->check_martingale(1e-12);
    mart.record(c.ok ? -c.worst_rel : std::min(-c.worst_rel, -1.0));
    nested.record(m->check_nested() ? 0.0 : -1.0);
  }
  try {
    const auto signs = primed_transform_signs(chain);
    const bool unit = std::all_of(signs.begin(), signs.end(), [](int v) { return v == 1 || v == -1; });
    transform.record(unit && !signs.empty() ? 0.0 : -1.0);
  } catch (const std::exception& e) {
    transform.record_failure(e.what());
  }
}

SuiteReport suite_extremal(const SuiteOptions& o) {
  const double p = pick_p(o, 3.0);
  if (!(p > 2.0)) throw ParameterError("suite extremal needs p > 2");
  SuiteReport r;
  r.p = p;

  Property closed("delta_matches_closed_form", 1e-10);
  Property mart("martingale_property", 1e-12);
  Property nested("nested_partitions", 0.0);
  Property transform("primed_transform_pm1", 0.0);
  for (double x0 : {1.0 / 24.0, 1e-2}) {
    for (double hint : {1.5, 0.1, 1e-3}) {
      const ExtremalParams prm = resolve_params(p, x0, hint);
      closed.record(-std::abs(prm.delta - delta_closed_form(p, x0, prm.n_steps)) / prm.delta);
      if (prm.n_steps <= 6000) check_chain(build_extremal_chain(prm), mart, nested, transform);
    }
  }
  r.properties = {closed, mart, nested, transform};

  if (p == 3.0) {
    Property fig("three_step_parameters", 1e-12);
    const ExtremalParams prm = resolve_params(3.0, 1.0 / 24.0, 1.5);
    fig.record(prm.n_steps == 3 ? -std::abs(prm.delta - 1.5) : -1.0);
    fig.record(-prm.residual());
    r.properties.push_back(fig);
  }

  Property primed("primed_ratio_near_sharp", 0.02);
  Property below("ratio_below_limit", 1e-12);
  for (double delta : {1e-3, 5e-4}) {
    const ExtremalChain chain = build_extremal_chain(resolve_params(p, 1e-2, delta));
    const RatioReport rr = evaluate_ratio(chain);
    primed.record(-std::abs(rr.primed_ratio / rr.sharp_constant - 1.0));
    below.record(rr.limit - rr.ratio);
  }
  primed.note = "relative distance of the primed ratio from p^p/(2^p(p-1)) at x0 = 1e-2, delta <= 1e-3";
  r.properties.push_back(primed);
  r.properties.push_back(below);

  Property two_step("two_step_identity_exact", 0.0);
  const PLt1Example ex = build_p_lt1_example();
  for (int i = 1; i <= 9; ++i) {
    const PLt1Report rep = p_lt1_report(ex, i / 10.0);
    two_step.record(rep.identity_exact && rep.g_weak_norm == 1.0 ? 0.0
                                                                 : -std::abs(rep.g_weak_norm - 2.0 * rep.f_norm) - 1.0);
  }
  r.properties.push_back(two_step);
  return r;
}

// ---------------------------------------------------------------------------

SuiteReport suite_mc_weak_type(const SuiteOptions& o) {
  const double p = pick_p(o, 3.0);
  if (!((p > 0.0 && p < 1.0) || p >= 2.0)) throw ParameterError("suite mc-weak-type needs 0 < p < 1 or p >= 2");
  const SimConfig cfg = sim_config(o, pick_n(o, 10000));
  SuiteReport r;
  r.p = p;
  const PairsReport rep = random_subordinate_pair_check(p, 1000, cfg);

  Property sigma("no_exceedance_beyond_4_sigma", 0.0);
  const PairResult* worst = nullptr;
  for (const auto& pr : rep.results) {
    sigma.record(4.0 - pr.worst_sigma);
    if (worst == nullptr || pr.worst_sigma > worst->worst_sigma) worst = &pr;
  }
  sigma.note = std::to_string(rep.warnings) + " pairs between 3 and 4 sigma; max ratio " + fmt(rep.max_ratio) +
               " against bound " + fmt(rep.bound);
  r.properties.push_back(sigma);
  if (worst != nullptr) {
    Estimate e;
    e.mean = worst->max_ratio;
    e.std_error = worst->std_error_at_max;
    e.n = rep.paths_per_pair;
    e.seed = cfg.master_seed;
    r.statistics.push_back(make_check("worst_pair_ratio", p, e, rep.bound, false));
  }
  return r;
}

SuiteReport suite_mc_strip(const SuiteOptions& o) {
  const double p = pick_p(o, 2.0);
  if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("suite mc-strip needs 1 <= p <= 2");
  const long n = pick_n(o, 100000);
  const SimConfig cfg = sim_config(o, n);
  SuiteReport r;
  r.p = p;

  const OrthWeakReport rep = weak_type_orth_check(p, cfg);
  r.statistics.push_back(rep.sharpness);

  const Estimate tau = strip_exit_time(0.0, 0.0, sim_config(o, std::max<long>(1, n / 10)));
  r.statistics.push_back(make_check("exit_time_mean", p, tau, 1.0, true));

  Property prob("every_path_exits", 0.0);
  prob.record(rep.prob - 1.0);
  Property scaling("std_error_scaling", 0.2);
  scaling.record(-std::abs(rep.std_error_ratio * std::sqrt(2.0) - 1.0));
  scaling.note = "std_error(2n)/std_error(n) = " + fmt(rep.std_error_ratio) + ", expected 1/sqrt(2)";

  SimConfig half = cfg;
  half.dt = cfg.dt / 2.0;
  half.dt_min = std::min(half.dt_min, half.dt);
  const Estimate m_half = strip_exit_moment(p, 0.0, 0.0, half);
  Property bias("dt_halving_shift", 0.0);
  const double se = std::max(rep.moment.std_error, m_half.std_error);
  bias.record(1.0 - std::abs(m_half.mean - rep.moment.mean) / se);
  bias.note = "shift in std errors: " + fmt(std::abs(m_half.mean - rep.moment.mean) / se);

  r.properties = {prob, scaling, bias};
  return r;
}

SuiteReport suite_harmonic(const SuiteOptions& o) {
  const double p = pick_p(o, 0.5);
  SuiteReport r;
  r.p = p;
  if (p > 0.0 && p < 1.0) {
    std::vector<double> grid;
    for (int i = 1; i < 40; ++i) grid.push_back(0.05 * i);
    for (int k = 2; k <= 9; ++k) grid.push_back(2.0 - std::pow(10.0, -k));
    const HarmonicReport rep = harmonic_1d_example(p, grid);
    Property bounded("value_at_most_2", 1e-12);
    for (const auto& pt : rep.points) bounded.record(2.0 - pt.value);
    Property approach("value_near_2_below_2", 1e-6);
    const std::vector<double> near{2.0 - 1e-7};
    approach.record(-std::abs(harmonic_1d_example(p, near).points.front().value - 2.0));
    Property norm("u_norm_is_one", 0.0);
    norm.record(-std::abs(rep.u_norm - 1.0));
    r.properties = {bounded, approach, norm};
    return r;
  }
  if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("suite harmonic needs 0 < p <= 2");
  const SimConfig cfg = sim_config(o, pick_n(o, 100000));
  const RectangleReport rep = harmonic_rectangle_check(p, 20.0, 1e-3, cfg);
  r.statistics.push_back(rep.moment_check);
  Property top("top_exit_probability_near_one", 1e-3);
  top.record(rep.top_exit.mean - 1.0);
  r.properties = {top};
  return r;
}

using SuiteFn = SuiteReport (*)(const SuiteOptions&);

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> m{
      {"w", suite_w},
      {"u-weak", suite_u_weak},
      {"u-orth", suite_u_orth},
      {"ode", suite_ode},
      {"extremal", suite_extremal},
      {"mc-weak-type", suite_mc_weak_type},
      {"mc-strip", suite_mc_strip},
      {"harmonic", suite_harmonic},
  };
  return m;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"w",        "u-weak",       "u-orth",   "ode",
                                              "extremal", "mc-weak-type", "mc-strip", "harmonic"};
  return names;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown suite '" + name + "'");
  const auto t0 = Clock::now();
  SuiteReport r = it->second(opts);
  r.suite = name;
  r.seed = opts.seed;
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

void to_json(nlohmann::json& j, const Property& prop) {
  j = nlohmann::json{{"name", prop.name},
                     {"samples", prop.samples},
                     {"violations", prop.violations},
                     {"worst_margin", number(prop.worst_margin)},
                     {"tolerance", prop.tolerance},
                     {"passed", prop.passed()}};
  if (!prop.note.empty()) j["note"] = prop.note;
}

void to_json(nlohmann::json& j, const StatCheck& s) {
  j = nlohmann::json{{"check", s.check},
                     {"p", s.p},
                     {"n", s.n},
                     {"estimate", number(s.estimate)},
                     {"std_error", number(s.std_error)},
                     {"bound", s.bound},
                     {"margin_sigma", number(s.margin_sigma)},
                     {"seed", s.seed},
                     {"two_sided", s.two_sided},
                     {"verdict", to_string(s.verdict)}};
}

void to_json(nlohmann::json& j, const RunManifest& m) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : m.parameters) params[k] = v;
  j = nlohmann::json{{"command", m.command},
                     {"parameters", params},
                     {"seed", m.seed},
                     {"artifact_version", m.artifact_version},
                     {"timestamp", m.timestamp}};
}

void to_json(nlohmann::json& j, const SuiteReport& r) {
  j = nlohmann::json{{"suite", r.suite},           {"p", r.p},
                     {"seed", r.seed},             {"passed", r.passed()},
                     {"properties", r.properties}, {"statistics", r.statistics}};
}

}  // namespace sharpweak
