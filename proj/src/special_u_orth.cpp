#include "sharpweak/special_u_orth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sharpweak/constants.hpp"
#include "sharpweak/errors.hpp"

namespace sharpweak {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr unsigned kMaxDepth = 15;
// Tighter panel tolerances only add roundoff to the Kronrod error estimate.
constexpr double kPanelRelTol = 1e-10;

// Bound on int_{|s| > S} of the transformed integrand (without the 2^p/pi^{p+1}
// prefactor). Valid for S >= max(2p, log(2|alpha|)); see poisson_w.
double tail_bound(double p, double alpha, double beta, double S) {
  const double core = 2.0 * std::pow(S, p) * std::exp(-S);
  const double upper = 8.0 * beta * core;
  const double gap = std::max(0.0, std::abs(alpha) - std::exp(-S));
  const double lower = 2.0 * beta * core / (beta * beta + gap * gap);
  return upper + lower;
}

}  // namespace

HalfPlaneImage conformal_strip_to_half(double x, double y) {
  if (!(std::abs(y) < 1.0)) throw std::domain_error("conformal_strip_to_half: needs |y| < 1");
  const double r = std::exp(kPi * x / 2.0);
  return {-r * std::sin(kPi * y / 2.0), r * std::cos(kPi * y / 2.0)};
}

OrthContext::OrthContext(Exponent p, double quad_tol) : p_(p.value()), quad_tol_(quad_tol) {
  if (!(p_ >= 1.0 && p_ <= 2.0)) throw std::domain_error("OrthContext: needs 1 <= p <= 2");
  if (!(quad_tol > 0.0)) throw std::domain_error("OrthContext: quad_tol must be positive");
  kpp_ = std::pow(kp(p).value, p_);
}

std::string OrthContext::quad_split() const {
  return "t = +-e^s on each half-line, GK15 panels split at s = 0; t = |alpha| + beta tan(theta) "
         "on [|alpha|/2, 2|alpha|]; tails beyond |s| = S bounded by 2 S^p e^{-S} envelopes";
}

double poisson_w(const OrthContext& ctx, double alpha, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("poisson_w: needs beta > 0");
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw std::domain_error("poisson_w: non-finite argument");
  const double p = ctx.p();
  const double a = std::abs(alpha);
  const double prefactor = std::pow(2.0, p) / std::pow(kPi, p + 1.0);

  double S = std::max({2.0 * p, 1.0, std::log(2.0 * std::max(a, 1e-300)) + 1.0});
  while (prefactor * tail_bound(p, alpha, beta, S) > ctx.quad_tol() / 4.0) S += 1.0;

  using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;
  double total = 0.0;
  double err_total = 0.0;
  auto integrate = [&](const auto& f, double lo, double hi, std::vector<double> cuts) {
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::erase_if(cuts, [&](double c) { return c < lo || c > hi; });
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (!(cuts[i + 1] > cuts[i])) continue;
      double err = 0.0;
      const double v = Quad::integrate(f, cuts[i], cuts[i + 1], kMaxDepth, kPanelRelTol, &err);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "poisson_w: non-finite panel [" << cuts[i] << ", " << cuts[i + 1] << "] at alpha=" << alpha
           << " beta=" << beta;
        throw QuadratureError(os.str());
      }
      total += v;
      err_total += err;
    }
  };

  // Half-line t = -sign(alpha) e^s: the kernel has no peak there.
  auto far_side = [&](double s) {
    const double e = std::exp(s);
    return beta * std::pow(std::abs(s), p) * e / ((a + e) * (a + e) + beta * beta);
  };
  // Half-line t = sign(alpha) e^s, peaked at e^s = |alpha|.
  auto near_side = [&](double s) {
    const double e = std::exp(s);
    return beta * std::pow(std::abs(s), p) * e / ((a - e) * (a - e) + beta * beta);
  };
  integrate(far_side, -S, S, {0.0});

  const double lo_peak = std::log(a / 2.0);
  const double hi_peak = std::log(2.0 * a);
  if (a > 0.0 && lo_peak > -S) {
    // Around the peak use t = |alpha| + beta tan(theta), which turns the
    // kernel into d(theta) and leaves |log t|^p to integrate.
    integrate(near_side, -S, lo_peak, {0.0});
    integrate(near_side, hi_peak, S, {0.0});
    auto peak = [&](double theta) { return std::pow(std::abs(std::log(a + beta * std::tan(theta))), p); };
    std::vector<double> cuts{0.0};
    if (a / 2.0 < 1.0 && 1.0 < 2.0 * a) cuts.push_back(std::atan((1.0 - a) / beta));
    // Panels at t = |alpha| +- 10^j beta, geometric towards the ends.
    for (double k = 1.0; k * beta < 2.0 * a; k *= 10.0) {
      cuts.push_back(std::atan(k));
      cuts.push_back(-std::atan(k));
    }
    integrate(peak, std::atan(-a / (2.0 * beta)), std::atan(a / beta), cuts);
  } else {
    integrate(near_side, -S, S, {0.0});
  }

  if (prefactor * err_total > ctx.quad_tol()) {
    std::ostringstream os;
    os.precision(6);
    os << "poisson_w: error estimate " << prefactor * err_total << " exceeds " << ctx.quad_tol()
       << " at alpha=" << alpha << " beta=" << beta << " (p=" << p << ", window |s| <= " << S << ")";
    throw QuadratureError(os.str());
  }
  return prefactor * total;
}

double u_orth(const OrthContext& ctx, double x, double y) {
  if (std::abs(y) >= 1.0) return std::pow(std::abs(x), ctx.p());
  const auto img = conformal_strip_to_half(x, y);
  return poisson_w(ctx, img.alpha, img.beta);
}

double v_orth(const OrthContext& ctx, double x, double y) {
  return (std::abs(y) >= 1.0 ? 1.0 : 0.0) - ctx.kpp() * std::pow(std::abs(x), ctx.p());
}

bool OrthReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const OrthCheck& c) { return c.violations == 0; });
}

OrthReport orth_property_suite(const OrthContext& ctx, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double p = ctx.p();
  const double step = 0.05;
  const double fd_tol = 8.0 * ctx.quad_tol() / (step * step);
  const double pt_tol = 4.0 * ctx.quad_tol();
  const double u00 = u_orth(ctx, 0.0, 0.0);
  auto u = [&](double x, double y) { return u_orth(ctx, x, y); };

  OrthReport report;
  report.p = p;
  auto make = [](std::string name, double tol) {
    OrthCheck c;
    c.name = std::move(name);
    c.tolerance = tol;
    c.worst_margin = std::numeric_limits<double>::infinity();
    return c;
  };
  auto record = [](OrthCheck& c, double margin) {
    ++c.samples;
    c.worst_margin = std::min(c.worst_margin, margin);
    if (margin < -c.tolerance) ++c.violations;
  };

  OrthCheck concave_y = make("concave_in_y", fd_tol);
  OrthCheck convex_x = make("convex_in_x", fd_tol);
  OrthCheck mixed = make("mixed_nonnegative", fd_tol);
  OrthCheck lower = make("lower_bound_u00", pt_tol);
  OrthCheck upper = make("upper_bound", pt_tol);
  OrthCheck major = make("majorizes_v", pt_tol);
  OrthCheck sym = make("fourfold_symmetry", pt_tol);

  const double inner = 1.0 - 2.0 * step;
  for (int i = 0; i < samples; ++i) {
    // Strip interior, away from |y| = 1 by two steps.
    const double x = -2.0 + 4.0 * unit(rng);
    const double y = -inner + 2.0 * inner * unit(rng);
    const double c = u(x, y);
    record(concave_y, -(u(x, y + step) - 2.0 * c + u(x, y - step)) / (step * step));
    record(convex_x, (u(x + step, y) - 2.0 * c + u(x - step, y)) / (step * step));

    const double qx = step + 2.0 * unit(rng);
    const double qy = step + (inner - step) * unit(rng);
    const double mxy = (u(qx + step, qy + step) - u(qx + step, qy - step) - u(qx - step, qy + step) +
                        u(qx - step, qy - step)) /
                       (4.0 * step * step);
    record(mixed, mxy);

    // Whole plane for the pointwise bounds.
    const double bx = -3.0 + 6.0 * unit(rng);
    const double by = -1.5 + 3.0 * unit(rng);
    const double ub = u(bx, by);
    if (std::abs(by) <= std::abs(bx)) record(lower, ub - u00);
    record(upper, std::pow(std::abs(bx), p) + (std::abs(by) < 1.0 ? 1.0 / ctx.kpp() : 0.0) - ub);
    record(major, 1.0 - ctx.kpp() * ub - v_orth(ctx, bx, by));
    const double worst_sym =
        std::max({std::abs(u(-bx, by) - ub), std::abs(u(bx, -by) - ub), std::abs(u(-bx, -by) - ub)});
    record(sym, -worst_sym);
  }
  report.checks = {concave_y, convex_x, mixed, lower, upper, major, sym};
  return report;
}

bool scalar_inequality_check(Exponent p_exp, double x, double h) {
  const double p = p_exp.value();
  if (!(p >= 1.0 && p <= 2.0)) throw std::domain_error("scalar_inequality_check: needs 1 <= p <= 2");
  const double lhs = std::pow(std::abs(x + h), p) + std::pow(std::abs(x - h), p);
  const double rhs = 2.0 * std::pow(std::abs(x), p) + 2.0 * std::pow(std::abs(h), p);
  return lhs <= rhs + 1e-12 * std::max(1.0, rhs);
}

}  // namespace sharpweak
