#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "sharpweak/atomic.hpp"

namespace sharpweak {

// Parameters of the p > 2 extremal chain: x0 (1 + 2 delta / p)^N = 1/p.
struct ExtremalParams {
  double p = 3.0;
  double x0 = 0.0;
  double delta = 0.0;
  int n_steps = 0;

  // |x0 (1 + 2 delta/p)^N - 1/p|.
  double residual() const;
};

// N = round(log(1/(p x0)) / log(1 + 2 delta_hint / p)), at least 1, then
// delta solved by bisection for that N. The bracket starts as
// (0, 10 delta_hint] and is doubled if the root lies above it. Throws
// ParameterError unless p > 2, 0 < x0 < 1/p, delta_hint > 0, or if the
// solved delta misses the equation by more than 1e-12.
ExtremalParams resolve_params(double p, double x0, double delta_hint);

// Closed form of the same root, (p/2)((p x0)^{-1/N} - 1); used to
// cross-check the bisection.
double delta_closed_form(double p, double x0, int n_steps);

// Interval lengths p_0 >= p_1 >= ... >= p_{2N}:
//   p_{2n} = r^n, r = (p - p delta + 4 delta) / ((p + 2 delta)(1 + delta)),
//   p_{2n+1} = p_{2n} / (1 + delta).
std::vector<double> extremal_weights(const ExtremalParams& params);

struct ExtremalChain {
  ExtremalParams params;
  AtomicMartingale x{0.0};
  AtomicMartingale y{0.0};
  std::vector<double> weights;  // p_0 .. p_{2N}
};

// The chain on ([0, 1], Lebesgue): X_0 = x0, Y_0 = (p-1) x0,
//   dX_{2n+1} = delta X_{2n} on [0, p_{2n+1}],  -X_{2n} on (p_{2n+1}, p_{2n}],
//   dX_{2n+2} = -(1 - 2/p) delta X_{2n} on [0, p_{2n+2}],
//               (1 + 4 delta/p - delta) X_{2n} on (p_{2n+2}, p_{2n+1}],
//   dX_{2N+1} = X_{2N} on [0, p_{2N}/2],  -X_{2N} on (p_{2N}/2, p_{2N}],
// and dY_n = (-1)^{n+1} dX_n. Throws ConstructionError if a weight leaves
// (0, 1] or the weights fail to decrease.
ExtremalChain build_extremal_chain(const ExtremalParams& params);

struct RatioReport {
  double prob = 0.0;    // P(Y_{2N+1} >= 1) by atom measure
  double moment = 0.0;  // E X_{2N+1}^p by atom summation
  double ratio = 0.0;
  // p^p / (2^p (p-1) - 2^p p (p-2) x0), the small-delta limit of ratio.
  double limit = 0.0;
  // Same quantities for X' = X / c, Y' = (Y - (p-2) x0) / c with
  // c = 1 - (p-2) x0: P(Y' >= 1) = prob, E X'^p = moment / c^p.
  double primed_moment = 0.0;
  double primed_ratio = 0.0;
  // p^p c^p / (2^p (p-1) - 2^p p (p-2) x0).
  double primed_limit = 0.0;
  // p^p / (2^p (p-1)).
  double sharp_constant = 0.0;
};

// Atoms where Y reaches 1 are counted with a relative slack of 1e-9; every
// other atom of Y_{2N+1} stays below 1 - 2/p + O(x0).
RatioReport evaluate_ratio(const ExtremalChain& chain);

// Signed increments of Y' against X': returns v_n with dY'_n = v_n dX'_n
// on every split (v_0 compares Y'_0 with X'_0), or throws if some split
// violates |dY| = |dX| beyond 1e-12 relative.
std::vector<int> primed_transform_signs(const ExtremalChain& chain);

// The 0 < p < 1 example: f_0 = g_0 = 1/2, df_1 = -dg_1 = -1/2 on [0, 3/4]
// and 3/2 on (3/4, 1].
struct PLt1Report {
  double p = 0.0;
  double f_norm = 0.0;       // sup_n ||f_n||_p
  double f1_norm = 0.0;      // ||f_1||_p
  double g_weak_norm = 0.0;  // ||g||_{p,inf}
  bool identity_exact = false;  // g_weak_norm == 2 f_norm
};

struct PLt1Example {
  AtomicMartingale f{0.5};
  AtomicMartingale g{0.5};
};

PLt1Example build_p_lt1_example();
PLt1Report p_lt1_report(const PLt1Example& ex, double p);

// Probability that Brownian motion started at `start` in (a, b) leaves
// through b: (start - a) / (b - a).
double exit_probability_right(double a, double b, double start);

struct HarmonicPoint {
  double lambda = 0.0;
  double mu = 0.0;     // sup over subintervals of P(|v| >= lambda at exit)
  double value = 0.0;  // lambda * mu^{1/p}
  double a = 0.0;      // a subinterval (a, b) attaining or approaching mu
  double b = 0.0;
};

struct HarmonicReport {
  double p = 0.0;
  std::vector<HarmonicPoint> points;
  double sup_value = 0.0;
  double u_norm = 1.0;  // ||u||_p = u(0)
};

// D = (-1, 3), start 0, u = 1 + x, v = 1 - x. For each lambda in (0, 2),
// the largest exit probability of {|v| >= lambda} over subintervals
// (a, b) of D containing 0. The probability is monotone in a and b once
// the exit sets are fixed, so the supremum is taken over the corners of
// the feasible rectangles. Throws std::domain_error for lambda outside
// (0, 2) or p outside (0, 1).
HarmonicReport harmonic_1d_example(double p, std::span<const double> lambda_grid);

}  // namespace sharpweak
