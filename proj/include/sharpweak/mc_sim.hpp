#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sharpweak/exponent.hpp"
#include "sharpweak/extremal.hpp"

namespace sharpweak {

struct SimConfig {
  std::uint64_t master_seed = 42;
  long n_samples = 100000;
  // Largest time step of the continuous schemes. Steps shrink near a
  // barrier down to dt_min.
  double dt = 1e-2;
  double dt_min = 1e-8;
  // Thresholds for the weak-type checks; empty means 20 log-spaced
  // points over [0.1, 10] * median(g*).
  std::vector<double> lambda_grid;
  int workers = 1;

  // Throws ParameterError unless n_samples >= 1, 0 < dt_min <= dt <= 1e-2
  // and workers >= 1.
  void validate() const;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  long n = 0;
  std::uint64_t seed = 0;
};

enum class Verdict { Pass, Warn, Fail };
std::string to_string(Verdict v);

// One statistical assertion. For an upper bound, margin_sigma is
// (estimate - bound) / std_error, so negative is good; for a two-sided
// target it is the signed deviation (estimate - bound) / std_error.
// |excess| above 4 sigma fails, 3..4 sigma warns.
struct StatCheck {
  std::string check;
  double p = 0.0;
  long n = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double margin_sigma = 0.0;
  std::uint64_t seed = 0;
  bool two_sided = false;
  Verdict verdict = Verdict::Pass;
};

StatCheck make_check(std::string name, double p, const Estimate& e, double bound, bool two_sided);

// Seed of sample `index` under `master`; a splitmix64 mix of both.
std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index);

// Exit of the second coordinate of a planar Brownian motion from the strip
// |y| < 1. The first coordinate is independent of the exit time, so
// B^1_tau = x + sqrt(tau) Z with Z standard normal.
//
// B^2 moves in Gaussian steps of length h = min(dt, max(dt_min, (d/2)^2)),
// d the distance to the nearer barrier. After each step that stays inside,
// an exit is still recorded with the Brownian-bridge crossing probability
// exp(-2 (1 - y0)(1 - y1) / h) + exp(-2 (1 + y0)(1 + y1) / h).
struct StripExit {
  double tau = 0.0;
  double x = 0.0;  // B^1 at exit
  double y = 0.0;  // +-1
  long steps = 0;
};

StripExit sample_strip_exit(double x, double y, const SimConfig& cfg, std::mt19937_64& rng);

// E |B^1_tau|^p from (x, y). Throws std::domain_error for |y| >= 1.
Estimate strip_exit_moment(double p, double x, double y, const SimConfig& cfg);

// E tau from (x, y); 1 - y^2 in closed form.
Estimate strip_exit_time(double x, double y, const SimConfig& cfg);

struct OrthWeakReport {
  double p = 0.0;
  Estimate moment;         // ||M||_p^p = E |B^1_tau|^p from (0, 0)
  double prob = 1.0;       // P(N* >= 1); every path exits the strip
  double kpp = 0.0;        // K_p^p
  StatCheck sharpness;     // K_p^p ||M||_p^p against 1
  // Standard errors at n and 2n with the ratio, expected 1/sqrt(2).
  double std_error_n = 0.0;
  double std_error_2n = 0.0;
  double std_error_ratio = 0.0;
};

// The stopped pair (B^1, B^2) at the strip exit. Also reruns with
// 2 n_samples to report the standard-error scaling. Needs 1 <= p <= 2.
OrthWeakReport weak_type_orth_check(double p, const SimConfig& cfg);

// One random non-negative martingale f with a +-1 transform g.
// f_0 = 1 and f_{k+1} = f_k (1 + u_k) with probability d_k / (u_k + d_k),
// f_k (1 - d_k) otherwise, u_k in [0.1, 2], d_k in [0.1, 0.95]. The signs
// v_k are predictable: v_k = a_k when f_{k-1} >= theta and b_k otherwise,
// with a_k, b_k, theta drawn once per pair; g_0 = v_0 f_0.
struct PairSpec {
  int n_steps = 1;
  std::vector<double> up;
  std::vector<double> down;
  std::vector<int> sign_above;
  std::vector<int> sign_below;
  double theta = 1.0;
  int sign0 = 1;
};

PairSpec random_pair_spec(std::mt19937_64& rng, int max_steps = 12);

struct PairResult {
  int index = 0;
  PairSpec spec;
  double moment = 0.0;        // max_n mean f_n^p
  double max_ratio = 0.0;     // max over lambda of lambda^p P(g* >= lambda) / moment
  double max_ratio_fixed_n = 0.0;  // same with sup_n P(|g_n| >= lambda)
  double lambda_at_max = 0.0;
  double std_error_at_max = 0.0;
  double worst_sigma = 0.0;   // max over lambda of (ratio - bound) / se
};

struct PairsReport {
  double p = 0.0;
  double bound = 0.0;  // 2^p for p < 1, p^p / (2^p (p-1)) for p >= 2
  int pairs = 0;
  long paths_per_pair = 0;
  std::vector<PairResult> results;
  double max_ratio = 0.0;
  double max_ratio_fixed_n = 0.0;
  double worst_sigma = 0.0;
  int warnings = 0;  // pairs with worst_sigma in (3, 4]
  int failures = 0;  // pairs with worst_sigma > 4
};

// `pairs` random pairs with cfg.n_samples paths each. p must be in (0, 1)
// or >= 2. Throws ConstructionError if a generated f goes negative.
PairsReport random_subordinate_pair_check(double p, int pairs, const SimConfig& cfg);

struct ChainSampleReport {
  Estimate prob;    // P(Y_{2N+1} >= 1)
  Estimate moment;  // E X_{2N+1}^p
  double ratio = 0.0;
  double ratio_std_error = 0.0;  // delta method
  RatioReport exact;
  StatCheck agreement;  // sampled ratio against the exact one
};

// Samples the extremal chain path by path as a Markov chain and compares
// with the exact atom computation.
ChainSampleReport sample_extremal_chain(const ExtremalParams& params, const SimConfig& cfg);

struct RectangleReport {
  double p = 0.0;
  double R = 0.0;
  double eps = 0.0;
  Estimate moment;     // E |B^1|^p at the exit of (-R, R) x (-1, 1)
  Estimate top_exit;   // P(|B^2| = 1 at exit) = mu(|v| >= 1)
  double kpp = 0.0;
  StatCheck moment_check;  // against K_p^{-p}
};

// Brownian motion from (0, 0) stopped on leaving (-R, R) x (-1, 1), the
// subdomain of R x (-1 - eps, 1 + eps) used for the harmonic sharpness
// example. Needs R >= 5, eps > 0, 1 <= p <= 2.
RectangleReport harmonic_rectangle_check(double p, double R, double eps, const SimConfig& cfg);

}  // namespace sharpweak
