#include "sharpweak/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sharpweak/errors.hpp"

namespace sharpweak {

double ExtremalParams::residual() const {
  return std::abs(x0 * std::pow(1.0 + 2.0 * delta / p, n_steps) - 1.0 / p);
}

ExtremalParams resolve_params(double p, double x0, double delta_hint) {
  if (!(p > 2.0)) throw ParameterError("resolve_params: needs p > 2");
  if (!(x0 > 0.0 && x0 < 1.0 / p)) throw ParameterError("resolve_params: needs 0 < x0 < 1/p");
  if (!(delta_hint > 0.0)) throw ParameterError("resolve_params: needs delta_hint > 0");
  const double target = std::log(1.0 / (p * x0));
  const double n_real = target / std::log1p(2.0 * delta_hint / p);
  if (!(n_real < 1e8)) throw ParameterError("resolve_params: delta_hint too small for x0");
  const int n = std::max(1, static_cast<int>(std::lround(n_real)));

  auto f = [&](double d) { return n * std::log1p(2.0 * d / p) - target; };
  double lo = 0.0;
  double hi = 10.0 * delta_hint;
  for (int i = 0; f(hi) < 0.0; ++i) {
    if (i > 200) throw ParameterError("resolve_params: no delta solves the equation");
    hi *= 2.0;
  }
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  ExtremalParams out{p, x0, std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi, n};
  if (!(out.delta > 0.0) || out.residual() > 1e-12) {
    std::ostringstream os;
    os << "resolve_params: solved delta " << out.delta << " leaves residual " << out.residual();
    throw ParameterError(os.str());
  }
  return out;
}

double delta_closed_form(double p, double x0, int n_steps) {
  return p / 2.0 * (std::pow(p * x0, -1.0 / n_steps) - 1.0);
}

std::vector<double> extremal_weights(const ExtremalParams& prm) {
  const double p = prm.p;
  const double d = prm.delta;
  const double r = (p - p * d + 4.0 * d) / ((p + 2.0 * d) * (1.0 + d));
  std::vector<double> w(static_cast<std::size_t>(2 * prm.n_steps + 1));
  for (int n = 0; n <= prm.n_steps; ++n) {
    w[static_cast<std::size_t>(2 * n)] = std::pow(r, n);
    if (n < prm.n_steps) w[static_cast<std::size_t>(2 * n + 1)] = std::pow(r, n) / (1.0 + d);
  }
  return w;
}

ExtremalChain build_extremal_chain(const ExtremalParams& prm) {
  const double p = prm.p;
  const double d = prm.delta;
  const int big_n = prm.n_steps;
  if (big_n < 1) throw ConstructionError("build_extremal_chain: needs N >= 1");

  ExtremalChain out;
  out.params = prm;
  out.weights = extremal_weights(prm);
  for (std::size_t i = 0; i < out.weights.size(); ++i) {
    const double w = out.weights[i];
    if (!(w > 0.0 && w <= 1.0) || (i > 0 && !(w < out.weights[i - 1]))) {
      std::ostringstream os;
      os << "build_extremal_chain: weight p_" << i << " = " << w << " leaves (0, 1] or fails to decrease";
      throw ConstructionError(os.str());
    }
  }
  out.x = AtomicMartingale(prm.x0);
  out.y = AtomicMartingale((p - 1.0) * prm.x0);

  // The active atom is [0, p_k]; all others are absorbed.
  int active = 0;
  auto step = [&](int n, double cut, double dx_left, double dx_right) {
    const Piece ax = out.x.atoms()[active].piece;
    const Piece ay = out.y.atoms()[active].piece;
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^{n+1}
    const Refinement rx{active, {{ax.lo, cut, ax.value + dx_left}, {cut, ax.hi, ax.value + dx_right}}};
    const Refinement ry{active,
                        {{ay.lo, cut, ay.value + sign * dx_left}, {cut, ay.hi, ay.value + sign * dx_right}}};
    out.x.add_step(std::span(&rx, 1));
    out.y.add_step(std::span(&ry, 1));
    active = static_cast<int>(out.x.atoms().size()) - 2;
  };

  for (int n = 0; n < big_n; ++n) {
    const double x2n = out.x.atoms()[active].piece.value;
    step(2 * n + 1, out.weights[static_cast<std::size_t>(2 * n + 1)], d * x2n, -x2n);
    step(2 * n + 2, out.weights[static_cast<std::size_t>(2 * n + 2)], -(1.0 - 2.0 / p) * d * x2n,
         (1.0 + 4.0 / p * d - d) * x2n);
  }
  const double x2big = out.x.atoms()[active].piece.value;
  step(2 * big_n + 1, out.weights[static_cast<std::size_t>(2 * big_n)] / 2.0, x2big, -x2big);
  return out;
}

RatioReport evaluate_ratio(const ExtremalChain& chain) {
  const double p = chain.params.p;
  const double x0 = chain.params.x0;
  const int last = chain.x.last_step();
  RatioReport r;
  for (int id : chain.y.alive(last)) {
    const Piece& pc = chain.y.atoms()[id].piece;
    if (pc.value >= 1.0 - 1e-9) r.prob += pc.length();
  }
  r.moment = chain.x.expectation(last, [p](double v) { return std::pow(std::abs(v), p); });
  r.ratio = r.prob / r.moment;
  const double denom = std::pow(2.0, p) * (p - 1.0) - std::pow(2.0, p) * p * (p - 2.0) * x0;
  r.limit = std::pow(p, p) / denom;
  const double c = 1.0 - (p - 2.0) * x0;
  r.primed_moment = r.moment / std::pow(c, p);
  r.primed_ratio = r.prob / r.primed_moment;
  r.primed_limit = std::pow(p, p) * std::pow(c, p) / denom;
  r.sharp_constant = std::pow(p, p) / (std::pow(2.0, p) * (p - 1.0));
  return r;
}

std::vector<int> primed_transform_signs(const ExtremalChain& chain) {
  const double p = chain.params.p;
  const double x0 = chain.params.x0;
  const double c = 1.0 - (p - 2.0) * x0;
  const AtomicMartingale xp = chain.x.affine(1.0 / c, 0.0);
  const AtomicMartingale yp = chain.y.affine(1.0 / c, -(p - 2.0) * x0 / c);
  std::vector<int> signs(static_cast<std::size_t>(xp.steps()), 0);

  const double x0p = xp.atoms()[0].piece.value;
  const double y0p = yp.atoms()[0].piece.value;
  if (std::abs(std::abs(y0p) - std::abs(x0p)) > 1e-12 * std::abs(x0p)) {
    if (std::abs(y0p) > std::abs(x0p)) throw ConstructionError("primed start: |Y'_0| > |X'_0|");
  }
  signs[0] = (y0p * x0p >= 0.0) ? 1 : -1;

  const auto ax = xp.atoms();
  const auto ay = yp.atoms();
  for (std::size_t i = 1; i < ax.size(); ++i) {
    const int parent = ax[i].parent;
    const double dx = ax[i].piece.value - ax[parent].piece.value;
    const double dy = ay[i].piece.value - ay[parent].piece.value;
    const double scale = std::max(std::abs(dx), std::abs(ax[parent].piece.value));
    const int n = ax[i].born;
    int& v = signs[static_cast<std::size_t>(n)];
    const int here = (dy * dx >= 0.0) ? 1 : -1;
    if (std::abs(dy - here * dx) > 1e-12 * scale) {
      std::ostringstream os;
      os << "primed transform: |dY'| != |dX'| at step " << n << " atom " << i;
      throw ConstructionError(os.str());
    }
    if (std::abs(dx) > 1e-12 * scale) {
      if (v != 0 && v != here) throw ConstructionError("primed transform: sign not predictable at step " +
                                                        std::to_string(n));
      v = here;
    }
  }
  return signs;
}

PLt1Example build_p_lt1_example() {
  PLt1Example ex;
  const Refinement rf{0, {{0.0, 0.75, 0.5 - 0.5}, {0.75, 1.0, 0.5 + 1.5}}};
  const Refinement rg{0, {{0.0, 0.75, 0.5 + 0.5}, {0.75, 1.0, 0.5 - 1.5}}};
  ex.f.add_step(std::span(&rf, 1));
  ex.g.add_step(std::span(&rg, 1));
  return ex;
}

PLt1Report p_lt1_report(const PLt1Example& ex, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p_lt1_report: needs 0 < p < 1");
  PLt1Report r;
  r.p = p;
  r.f_norm = strong_norm(ex.f, p);
  double s = 0.0;
  for (const auto& pc : ex.f.partition(1)) s += pc.length() * std::pow(std::abs(pc.value), p);
  r.f1_norm = std::pow(s, 1.0 / p);
  r.g_weak_norm = weak_norm(ex.g, p);
  r.identity_exact = r.g_weak_norm == 2.0 * r.f_norm;
  return r;
}

double exit_probability_right(double a, double b, double start) {
  if (!(a < start && start < b)) throw std::domain_error("exit_probability_right: needs a < start < b");
  return (start - a) / (b - a);
}

namespace {

struct Span1 {
  double lo;
  double hi;
};

// Probability of leaving (a, b) through a feasible endpoint, with the
// limits at a = 0 or b = 0 taken in the most favourable way.
double corner_mu(double a, double b, bool ia, bool ib) {
  if (a == 0.0 && b == 0.0) return (ia || ib) ? 1.0 : 0.0;
  if (ia && ib) return 1.0;
  const double pb = -a / (b - a);
  return (ia ? 1.0 - pb : 0.0) + (ib ? pb : 0.0);
}

}  // namespace

HarmonicReport harmonic_1d_example(double p, std::span<const double> lambda_grid) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("harmonic_1d_example: needs 0 < p < 1");
  constexpr double kLeft = -1.0;
  constexpr double kRight = 3.0;
  HarmonicReport rep;
  rep.p = p;
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0 && lambda < 2.0)) throw std::domain_error("harmonic_1d_example: lambda outside (0, 2)");
    // Left end a in (-1, 0): |v(a)| = 1 - a >= lambda iff a <= 1 - lambda.
    std::vector<std::pair<Span1, bool>> left;
    const double a_cut = 1.0 - lambda;
    if (a_cut > kLeft) left.push_back({{kLeft, std::min(0.0, a_cut)}, true});
    if (a_cut < 0.0) left.push_back({{std::max(kLeft, a_cut), 0.0}, false});
    // Right end b in (0, 3): |1 - b| >= lambda iff b <= 1 - lambda or b >= 1 + lambda.
    std::vector<std::pair<Span1, bool>> right;
    if (1.0 - lambda > 0.0) right.push_back({{0.0, 1.0 - lambda}, true});
    right.push_back({{std::max(0.0, 1.0 - lambda), std::min(kRight, 1.0 + lambda)}, false});
    if (1.0 + lambda < kRight) right.push_back({{1.0 + lambda, kRight}, true});

    HarmonicPoint best{lambda, -1.0, 0.0, 0.0, 0.0};
    for (const auto& [sa, ia] : left) {
      for (const auto& [sb, ib] : right) {
        if (!(sa.hi > sa.lo) || !(sb.hi > sb.lo)) continue;
        if (ia && ib) {
          // Attained by every interval with both ends feasible.
          best = {lambda, 1.0, 0.0, 0.5 * (sa.lo + sa.hi), 0.5 * (sb.lo + sb.hi)};
          continue;
        }
        for (double a : {sa.lo, sa.hi}) {
          for (double b : {sb.lo, sb.hi}) {
            const double mu = corner_mu(a, b, ia, ib);
            if (mu > best.mu) {
              best.mu = mu;
              best.a = a;
              best.b = b;
            }
          }
        }
      }
    }
    best.value = best.mu == 1.0 ? lambda : lambda * std::pow(best.mu, 1.0 / p);
    rep.sup_value = std::max(rep.sup_value, best.value);
    rep.points.push_back(best);
  }
  return rep;
}

}  // namespace sharpweak
