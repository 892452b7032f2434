#include "sharpweak/special_u_weak.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sharpweak/errors.hpp"

namespace sharpweak {

namespace {

std::string describe(HalfPlanePoint pt) {
  std::ostringstream os;
  os.precision(17);
  os << '(' << pt.x << ", " << pt.y << ')';
  return os.str();
}

// h(x + |y|), rethrowing table overruns with the offending point.
double h_at(const UWContext& ctx, HalfPlanePoint pt, double s) {
  try {
    return h_of(ctx.h(), s);
  } catch (const std::domain_error& e) {
    throw EvaluationError("point " + describe(pt) + ": " + e.what());
  }
}

double g_at(const UWContext& ctx, HalfPlanePoint pt, double r) {
  try {
    return ctx.g().value(r);
  } catch (const std::domain_error& e) {
    throw EvaluationError("point " + describe(pt) + ": " + e.what());
  }
}

double gprime_at(const UWContext& ctx, HalfPlanePoint pt, double r) {
  try {
    return ctx.g().derivative(r);
  } catch (const std::domain_error& e) {
    throw EvaluationError("point " + describe(pt) + ": " + e.what());
  }
}

// Coefficient p^p / (2 (p-1) (p-2)^{p-2}) of the D1 piece.
double d1_coeff(double p) { return std::pow(p, p) / (2.0 * (p - 1.0) * std::pow(p - 2.0, p - 2.0)); }

// Gradient for y >= 0 from the formulas of region r, with ay = |y|.
Gradient upper_gradient(const UWContext& ctx, Region r, HalfPlanePoint pt, double ay) {
  const double p = ctx.p();
  const double c0 = ctx.c0();
  const double x = pt.x;
  const double s = x + ay;
  switch (r) {
    case Region::D0:
    case Region::D7:
      return {-p * c0 * std::pow(x, p - 1.0), 0.0};
    case Region::D1: {
      const double c1 = d1_coeff(p);
      const double w = std::pow(ay - x, p - 2.0);
      return {c1 * w * (ay - p * x), c1 * (p - 1.0) * x * w};
    }
    case Region::D2: {
      const double w = std::pow(s, p - 2.0);
      return {p / (2.0 * (p - 1.0)) * w * ((p - 2.0) * ay - (p * p - 2.0 * p + 2.0) * x),
              p / 2.0 * w * (2.0 * ay - (p - 2.0) * x)};
    }
    case Region::D3: {
      const double d = 1.0 + x - ay;
      return {-p * p / (2.0 * (p - 1.0)) + 2.0 * (1.0 - ay) / (d * d), 2.0 * x / (d * d)};
    }
    case Region::D4: {
      const double w = std::pow(x + 1.0 - ay, p - 2.0);
      return {-c0 * w * (p * x - (p - 2.0) * (1.0 - ay)),
              p * p / (2.0 * (p - 1.0)) + c0 * w * ((p - 2.0) * x - p * (1.0 - ay))};
    }
    case Region::D5: {
      const double hs = h_at(ctx, pt, s);
      const double d = hs - s + 1.0;
      const double lin = 2.0 * (hs - x) / (d * d);
      return {lin - p * c0 * std::pow(hs, p - 1.0), lin};
    }
    case Region::D6: {
      const double rr = x - ay + 1.0;
      const double gr = g_at(ctx, pt, rr);
      const double d = 1.0 + rr - gr;
      return {2.0 * (1.0 - ay) / (d * d) - p * c0 * std::pow(rr, p - 1.0), 2.0 * (1.0 + x - gr) / (d * d)};
    }
  }
  return {};
}

// U_xx and U_yy for y > 0 from region r's formulas.
std::pair<double, double> upper_pure_seconds(const UWContext& ctx, Region r, HalfPlanePoint pt, double ay) {
  const double p = ctx.p();
  const double c0 = ctx.c0();
  const double x = pt.x;
  const double s = x + ay;
  const double pp2 = std::pow(p, p) / std::pow(2.0, p);  // p^p / 2^p = (p-1) c0
  switch (r) {
    case Region::D0:
    case Region::D7:
      return {-p * (p - 1.0) * c0 * std::pow(x, p - 2.0), 0.0};
    case Region::D1: {
      const double c2 = d1_coeff(p) * (p - 1.0);
      const double w = std::pow(ay - x, p - 3.0);
      return {c2 * w * (p * x - 2.0 * ay), c2 * w * (p - 2.0) * x};
    }
    case Region::D2: {
      const double w = std::pow(s, p - 3.0);
      return {-p * w * ((p * p - 2.0 * p + 2.0) / 2.0 * x + ay),
              -p * w * ((p * p - 4.0 * p + 2.0) / 2.0 * x - (p - 1.0) * ay)};
    }
    case Region::D3: {
      const double d3 = std::pow(1.0 + x - ay, 3.0);
      return {-4.0 * (1.0 - ay) / d3, 4.0 * x / d3};
    }
    case Region::D4: {
      const double w = std::pow(x + 1.0 - ay, p - 3.0);
      return {-pp2 * w * (p * x + (p - 4.0) * (ay - 1.0)), pp2 * w * (-(p - 4.0) * x + p * (1.0 - ay))};
    }
    case Region::D5: {
      const double hs = h_at(ctx, pt, s);
      const double hp = h_prime(ctx.h(), s);
      const double d = hs - s + 1.0;
      const double common = 2.0 * (hs - x) * (hp - 1.0) / d;
      const double f = 2.0 / (d * d);
      return {f * (-2.0 + hp - common), f * (hp - common)};
    }
    case Region::D6: {
      const double rr = x - ay + 1.0;
      const double gr = g_at(ctx, pt, rr);
      const double gp = gprime_at(ctx, pt, rr);
      const double d = 1.0 + rr - gr;
      const double first = -4.0 * (1.0 - ay) * (1.0 - gp) / (d * d * d);
      return {first - p * pp2 * std::pow(rr, p - 2.0), first + 2.0 * (2.0 - gp) / (d * d)};
    }
  }
  return {0.0, 0.0};
}

double finite_mixed(const UWContext& ctx, HalfPlanePoint pt, double e) {
  auto u = [&](double x, double y) { return u_value(ctx, {x, y}); };
  return (u(pt.x + e, pt.y + e) - u(pt.x + e, pt.y - e) - u(pt.x - e, pt.y + e) + u(pt.x - e, pt.y - e)) /
         (4.0 * e * e);
}

}  // namespace

std::string to_string(Region r) { return "D" + std::to_string(index(r)); }

// ---------------------------------------------------------------------------
// Context

UWContext::UWContext(double p, std::shared_ptr<const GSolution> g, double boundary_tol)
    : p_(p),
      c0_(std::pow(p, p) / (std::pow(2.0, p) * (p - 1.0))),
      g_(g),
      h_(std::move(g)),
      boundary_tol_(boundary_tol) {
  mixed_sign_.fill(0);
}

UWContext UWContext::build(Exponent p_exp, double boundary_tol) {
  const double p = p_exp.value();
  if (!(p > 2.0)) throw std::domain_error("UWContext: needs p > 2");
  if (!(boundary_tol > 0.0)) throw std::domain_error("UWContext: boundary_tol must be positive");
  auto g = std::make_shared<const GSolution>(build_g_rk(p_exp, default_t_max(p), 1e-3));
  UWContext ctx(p, std::move(g), boundary_tol);

  // One interior probe per region D1..D6 decides which of the two
  // "linear along a diagonal" relations the region satisfies.
  constexpr double kProbeRadius = 2e-3;
  constexpr double kFdStep = 1e-4;
  for (int r = 1; r <= 6; ++r) {
    const auto region = static_cast<Region>(r);
    bool found = false;
    for (double y = 0.005; y < 1.0 && !found; y += 0.01) {
      for (double x = 0.005; x < 2.5 && !found; x += 0.01) {
        const HalfPlanePoint pt(x, y);
        if (classify(ctx, pt) != region || !is_interior(ctx, pt, kProbeRadius)) continue;
        const auto [xx, yy] = upper_pure_seconds(ctx, region, pt, y);
        const double fd = finite_mixed(ctx, pt, kFdStep);
        const double half = 0.5 * (xx + yy);
        ctx.mixed_sign_[static_cast<std::size_t>(r)] = std::abs(fd - half) < std::abs(fd + half) ? 1 : -1;
        found = true;
      }
    }
    if (!found) throw ConstructionError("UWContext: no interior probe point for " + to_string(region));
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// Classification and values

Region classify(const UWContext& ctx, HalfPlanePoint pt) {
  const double p = ctx.p();
  const double x = pt.x;
  const double ay = std::abs(pt.y);
  const double s = x + ay;
  const double diag = x + 1.0 - 2.0 / p;

  if (ay >= 1.0) return Region::D0;
  if ((p - 1.0) * x <= ay && ay < diag) return Region::D1;
  if ((p - 2.0) / 2.0 * x <= ay && ay < std::min(1.0 - x, (p - 1.0) * x)) return Region::D2;
  if (diag <= ay && ay < 1.0 - x) return Region::D3;
  if (std::max(1.0 - x, diag) <= ay && ay < 1.0) return Region::D4;
  // h is only defined on [1, inf); both remaining pieces live in s >= 1.
  // x > (h + s - 1)/2 and |y| >= (1 - h + s)/2 are both |y| against
  // x + 1 - h(s); comparing with one rounded value keeps D5 and D6 from
  // leaving a sliver between them.
  if (s >= 1.0) {
    const double hs = h_at(ctx, pt, s);
    const double split = x + 1.0 - hs;
    if (hs >= x && ay < split) return Region::D5;
    if (split <= ay && ay < std::min(diag, 1.0)) return Region::D6;
  }
  return Region::D7;
}

double u_branch(const UWContext& ctx, Region r, HalfPlanePoint pt) {
  const double p = ctx.p();
  const double c0 = ctx.c0();
  const double x = pt.x;
  const double ay = std::abs(pt.y);
  const double s = x + ay;
  switch (r) {
    case Region::D0:
      return 1.0 - c0 * std::pow(x, p);
    case Region::D1:
      return d1_coeff(p) * x * std::pow(ay - x, p - 1.0);
    case Region::D2:
      return std::pow(s, p - 1.0) / (p - 1.0) * ((p - 1.0) * ay - (p * p - 2.0 * p + 2.0) / 2.0 * x);
    case Region::D3:
      return x / (2.0 * (p - 1.0) * (1.0 + x - ay)) * (-(p - 2.0) * (p - 2.0) + p * p * (ay - x));
    case Region::D4:
      return 1.0 - p * p / (2.0 * (p - 1.0)) * (1.0 - ay) - c0 * (s - 1.0) * std::pow(x + 1.0 - ay, p - 1.0);
    case Region::D5: {
      const double hs = h_at(ctx, pt, s);
      return c0 * std::pow(hs, p - 1.0) * ((p - 1.0) * hs - p * x);
    }
    case Region::D6: {
      const double rr = x - ay + 1.0;
      const double gr = g_at(ctx, pt, rr);
      return 1.0 - 2.0 * (1.0 - ay) / (1.0 + rr - gr) -
             c0 * std::pow(rr, p - 1.0) * (x - (p - 1.0) * (1.0 - ay));
    }
    case Region::D7:
      return -c0 * std::pow(x, p);
  }
  return 0.0;
}

double u_value(const UWContext& ctx, HalfPlanePoint pt) { return u_branch(ctx, classify(ctx, pt), pt); }

double v_value(const UWContext& ctx, HalfPlanePoint pt) {
  return (std::abs(pt.y) >= 1.0 ? 1.0 : 0.0) - ctx.c0() * std::pow(pt.x, ctx.p());
}

Gradient u_gradient_branch(const UWContext& ctx, Region r, HalfPlanePoint pt) {
  Gradient g = upper_gradient(ctx, r, pt, std::abs(pt.y));
  if (pt.y < 0.0) g.psi = -g.psi;
  return g;
}

Gradient u_gradient_ext(const UWContext& ctx, HalfPlanePoint pt) {
  return u_gradient_branch(ctx, classify(ctx, pt), pt);
}

bool is_interior(const UWContext& ctx, HalfPlanePoint pt, double radius) {
  if (pt.x < radius) return false;
  const Region home = classify(ctx, pt);
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      if (dx == 0 && dy == 0) continue;
      if (classify(ctx, {pt.x + dx * radius, pt.y + dy * radius}) != home) return false;
    }
  }
  // The axis y = 0 is where the reflected formulas meet; treat it as a
  // boundary except in D0/D7, where U does not depend on y.
  if (std::abs(pt.y) < radius && home != Region::D7 && home != Region::D0) return false;
  return true;
}

SecondDerivatives u_second_derivs(const UWContext& ctx, HalfPlanePoint pt) {
  if (!is_interior(ctx, pt, ctx.boundary_tol())) {
    throw EvaluationError("second derivatives undefined on a region boundary at " + describe(pt));
  }
  const Region r = classify(ctx, pt);
  const auto [xx, yy] = upper_pure_seconds(ctx, r, pt, std::abs(pt.y));
  double xy = 0.0;
  if (r != Region::D0 && r != Region::D7) {
    xy = ctx.mixed_sign(r) * 0.5 * (xx + yy);
    if (pt.y < 0.0) xy = -xy;
  }
  return {xx, xy, yy};
}

// ---------------------------------------------------------------------------
// Property checks

bool tangent_check(const UWContext& ctx, double x, double y, double h, double k) {
  if (!(x >= 0.0 && x + h >= 0.0)) throw std::domain_error("tangent_check: needs x >= 0 and x + h >= 0");
  if (!(std::abs(k) <= std::abs(h))) throw std::domain_error("tangent_check: needs |k| <= |h|");
  const HalfPlanePoint base(x, y);
  const Gradient d = u_gradient_ext(ctx, base);
  return u_value(ctx, {x + h, y + k}) <= u_value(ctx, base) + d.phi * h + d.psi * k + 1e-9;
}

bool diagonal_monotone_check(const UWContext& ctx, double x, double y, std::span<const double> t_grid) {
  if (!(x >= 0.0 && std::abs(y) < 1.0)) throw std::domain_error("diagonal_monotone_check: needs x >= 0, |y| < 1");
  double prev = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (!(x + t >= 0.0 && std::abs(y + t) < 1.0)) {
      throw std::domain_error("diagonal_monotone_check: grid point outside x + t >= 0, |y + t| < 1");
    }
    if (i > 0 && !(t > t_grid[i - 1])) throw std::domain_error("diagonal_monotone_check: grid must increase");
    const Gradient d = u_gradient_ext(ctx, {x + t, y + t});
    const double value = d.phi - d.psi;
    if (i > 0 && value > prev + 1e-9) return false;
    prev = value;
  }
  return true;
}

bool majorization_check(const UWContext& ctx, HalfPlanePoint pt) {
  return u_value(ctx, pt) >= v_value(ctx, pt) - 1e-10;
}

double corner_slope_gap(double p, double x) {
  if (!(x > 0.0)) throw std::domain_error("corner_slope_gap: needs x > 0");
  return -p * p / (2.0 * (p - 1.0)) + 1.0 / (2.0 * x) + std::pow(p, p) / (2.0 * (p - 1.0)) * std::pow(x, p - 1.0);
}

// ---------------------------------------------------------------------------
// Boundary sampling

namespace {

constexpr double kBisectWidth = 1e-13;

bool near_singular(HalfPlanePoint pt, double exclusion) {
  return std::hypot(pt.x, std::abs(pt.y) - 1.0) < exclusion;
}

// Bisects [a, b] (in different regions) down to kBisectWidth and returns the
// sample straddling the last class change.
BoundarySample bisect(const UWContext& ctx, HalfPlanePoint a, Region ra, HalfPlanePoint b, Region rb) {
  while (std::hypot(b.x - a.x, b.y - a.y) > kBisectWidth) {
    const HalfPlanePoint m(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    const Region rm = classify(ctx, m);
    if (rm == ra) {
      a = m;
    } else {
      b = m;
      rb = rm;
    }
  }
  BoundarySample out;
  out.a = ra;
  out.b = rb;
  out.on_a = a;
  out.on_b = b;
  out.gap = std::abs(u_branch(ctx, ra, a) - u_branch(ctx, rb, b));
  if (index(out.a) > index(out.b)) {
    std::swap(out.a, out.b);
    std::swap(out.on_a, out.on_b);
  }
  return out;
}

}  // namespace

double ContinuityScan::worst_gap() const {
  double worst = 0.0;
  for (const auto& [pair, samples] : by_pair) {
    for (const auto& s : samples) worst = std::max(worst, s.gap);
  }
  return worst;
}

ContinuityScan scan_continuity(const UWContext& ctx, int per_pair, std::uint64_t seed, double exclusion,
                               int min_hits) {
  ContinuityScan scan;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kPi = 3.14159265358979323846;

  auto try_segment = [&](double cx, double cy, double len) {
    ++scan.segments_tried;
    const double angle = 2.0 * kPi * unit(rng);
    const double dx = 0.5 * len * std::cos(angle);
    const double dy = 0.5 * len * std::sin(angle);
    const double ax = cx - dx, ay = cy - dy, bx = cx + dx, by = cy + dy;
    if (ax < 0.0 || bx < 0.0) return;
    const HalfPlanePoint a(ax, ay), b(bx, by);
    const Region ra = classify(ctx, a);
    const Region rb = classify(ctx, b);
    if (ra == rb) return;
    BoundarySample s = bisect(ctx, a, ra, b, rb);
    if (near_singular(s.on_a, exclusion) || near_singular(s.on_b, exclusion)) return;
    auto& bucket = scan.by_pair[{s.a, s.b}];
    if (static_cast<int>(bucket.size()) < per_pair) bucket.push_back(s);
  };

  // Discovery over the whole box.
  const long discovery = std::max(20000L, 4L * per_pair);
  for (long i = 0; i < discovery; ++i) {
    try_segment(2.5 * unit(rng), -1.6 + 3.2 * unit(rng), 0.005 + 0.1 * unit(rng));
  }

  // Top up each pair by sampling around its known boundary points.
  const long budget = 400L * per_pair;
  for (long spent = 0; spent < budget;) {
    bool all_full = true;
    for (auto& [pair, samples] : scan.by_pair) {
      if (static_cast<int>(samples.size()) >= per_pair || static_cast<int>(samples.size()) < min_hits) continue;
      all_full = false;
      const auto& anchor = samples[static_cast<std::size_t>(unit(rng) * static_cast<double>(samples.size()))];
      const double jx = anchor.on_a.x + 0.05 * (unit(rng) - 0.5);
      const double jy = anchor.on_a.y + 0.05 * (unit(rng) - 0.5);
      for (int j = 0; j < 64; ++j, ++spent) try_segment(jx + 0.02 * (unit(rng) - 0.5), jy, 0.002 + 0.01 * unit(rng));
    }
    if (all_full) break;
  }
  return scan;
}

std::vector<BoundarySample> trace_boundaries(const UWContext& ctx, double x_max, double y_max, int lines) {
  std::vector<BoundarySample> out;
  const int steps = 600;
  auto scan_line = [&](HalfPlanePoint from, HalfPlanePoint to) {
    HalfPlanePoint prev = from;
    Region rprev = classify(ctx, prev);
    for (int i = 1; i <= steps; ++i) {
      const double f = static_cast<double>(i) / steps;
      const HalfPlanePoint cur(from.x + f * (to.x - from.x), from.y + f * (to.y - from.y));
      const Region rcur = classify(ctx, cur);
      if (rcur != rprev) out.push_back(bisect(ctx, prev, rprev, cur, rcur));
      prev = cur;
      rprev = rcur;
    }
  };
  for (int i = 1; i <= lines; ++i) {
    const double y = y_max * i / (lines + 1.0);
    scan_line({0.0, y}, {x_max, y});
    const double x = x_max * i / (lines + 1.0);
    scan_line({x, 0.0}, {x, y_max});
  }
  std::sort(out.begin(), out.end(), [](const BoundarySample& l, const BoundarySample& r) {
    if (l.a != r.a) return l.a < r.a;
    if (l.b != r.b) return l.b < r.b;
    if (l.on_a.x != r.on_a.x) return l.on_a.x < r.on_a.x;
    return l.on_a.y < r.on_a.y;
  });
  return out;
}

}  // namespace sharpweak
