#include "sharpweak/mc_sim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sharpweak/constants.hpp"
#include "sharpweak/errors.hpp"

namespace sharpweak {

namespace {

constexpr long kChunk = 8192;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Running means and co-moments of up to kDim outputs (Welford), merged
// with the pairwise update of Chan et al. so that merge order alone
// determines the rounding.
constexpr int kDim = 3;
struct Moments {
  long n = 0;
  std::array<double, kDim> mean{};
  std::array<std::array<double, kDim>, kDim> co{};

  void add(const std::array<double, kDim>& v, int dim) {
    ++n;
    std::array<double, kDim> delta{};
    for (int i = 0; i < dim; ++i) {
      delta[i] = v[i] - mean[i];
      mean[i] += delta[i] / static_cast<double>(n);
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) co[i][j] += delta[i] * (v[j] - mean[j]);
    }
  }

  void merge(const Moments& o, int dim) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double nt = na + nb;
    std::array<double, kDim> delta{};
    for (int i = 0; i < dim; ++i) delta[i] = o.mean[i] - mean[i];
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) co[i][j] += o.co[i][j] + delta[i] * delta[j] * na * nb / nt;
    }
    for (int i = 0; i < dim; ++i) mean[i] += delta[i] * nb / nt;
    n += o.n;
  }

  Estimate estimate(int i, std::uint64_t seed) const {
    Estimate e;
    e.mean = mean[i];
    e.n = n;
    e.seed = seed;
    e.std_error = n > 1 ? std::sqrt(co[i][i] / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return e;
  }

  // Covariance of the two sample means.
  double mean_cov(int i, int j) const {
    return n > 1 ? co[i][j] / static_cast<double>(n - 1) / static_cast<double>(n) : 0.0;
  }
};

// Runs `fn(rng, out)` once per sample index with an engine seeded from
// (master_seed, index). Chunks of fixed size are merged in index order,
// so the result does not depend on the number of workers.
using SampleFn = std::function<void(std::mt19937_64&, std::array<double, kDim>&)>;

Moments run_samples(const SimConfig& cfg, int dim, const SampleFn& fn) {
  const long n_chunks = (cfg.n_samples + kChunk - 1) / kChunk;
  std::vector<Moments> chunks(static_cast<std::size_t>(n_chunks));
  std::atomic<long> next{0};
  auto work = [&] {
    std::mt19937_64 rng;
    std::array<double, kDim> out{};
    for (long c = next++; c < n_chunks; c = next++) {
      Moments m;
      const long end = std::min(cfg.n_samples, (c + 1) * kChunk);
      for (long i = c * kChunk; i < end; ++i) {
        rng.seed(sample_seed(cfg.master_seed, static_cast<std::uint64_t>(i)));
        fn(rng, out);
        m.add(out, dim);
      }
      chunks[static_cast<std::size_t>(c)] = m;
    }
  };
  const int threads = static_cast<int>(std::min<long>(cfg.workers, n_chunks));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  Moments total;
  for (const auto& m : chunks) total.merge(m, dim);
  return total;
}

// Runs `fn(index)` for index in [0, count) across workers; the caller
// stores results by index.
void run_units(int count, int workers, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) fn(i);
  };
  const int threads = std::min(workers, count);
  if (threads <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
}

double uniform01(std::mt19937_64& rng) { return std::generate_canonical<double, 64>(rng); }

}  // namespace

void SimConfig::validate() const {
  if (n_samples < 1) throw ParameterError("SimConfig: n_samples must be >= 1");
  if (!(dt > 0.0 && dt <= 1e-2)) throw ParameterError("SimConfig: dt must lie in (0, 1e-2]");
  if (!(dt_min > 0.0 && dt_min <= dt)) throw ParameterError("SimConfig: dt_min must lie in (0, dt]");
  if (workers < 1) throw ParameterError("SimConfig: workers must be >= 1");
  for (double l : lambda_grid) {
    if (!(l > 0.0)) throw ParameterError("SimConfig: lambda_grid entries must be positive");
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Warn:
      return "warn";
    case Verdict::Fail:
      return "fail";
  }
  return "?";
}

StatCheck make_check(std::string name, double p, const Estimate& e, double bound, bool two_sided) {
  StatCheck c;
  c.check = std::move(name);
  c.p = p;
  c.n = e.n;
  c.estimate = e.mean;
  c.std_error = e.std_error;
  c.bound = bound;
  c.seed = e.seed;
  c.two_sided = two_sided;
  const double diff = e.mean - bound;
  if (e.std_error > 0.0) {
    c.margin_sigma = diff / e.std_error;
  } else {
    c.margin_sigma = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  const double excess = two_sided ? std::abs(c.margin_sigma) : c.margin_sigma;
  c.verdict = excess > 4.0 ? Verdict::Fail : excess > 3.0 ? Verdict::Warn : Verdict::Pass;
  return c;
}

std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

// ---------------------------------------------------------------------------
// Strip exit

StripExit sample_strip_exit(double x, double y, const SimConfig& cfg, std::mt19937_64& rng) {
  if (!(std::abs(y) < 1.0)) throw std::domain_error("sample_strip_exit: needs |y| < 1");
  std::normal_distribution<double> normal;
  StripExit out;
  double t = 0.0;
  for (;;) {
    const double d = 1.0 - std::abs(y);
    const double h = std::min(cfg.dt, std::max(cfg.dt_min, 0.25 * d * d));
    const double y1 = y + std::sqrt(h) * normal(rng);
    t += h;
    ++out.steps;
    if (std::abs(y1) >= 1.0) {
      out.y = std::copysign(1.0, y1);
      break;
    }
    const double eu = 2.0 * (1.0 - y) * (1.0 - y1) / h;
    const double el = 2.0 * (1.0 + y) * (1.0 + y1) / h;
    // Below e^-50 a crossing is never drawn in practice; skip the draw.
    if (std::min(eu, el) < 50.0) {
      const double pu = std::exp(-eu);
      const double pl = std::exp(-el);
      const double u = uniform01(rng);
      if (u < pu + pl) {
        out.y = u < pu ? 1.0 : -1.0;
        break;
      }
    }
    y = y1;
  }
  out.tau = t;
  out.x = x + std::sqrt(t) * normal(rng);
  return out;
}

Estimate strip_exit_moment(double p, double x, double y, const SimConfig& cfg) {
  cfg.validate();
  if (!(p > 0.0)) throw std::domain_error("strip_exit_moment: needs p > 0");
  if (!(std::abs(y) < 1.0)) throw std::domain_error("strip_exit_moment: needs |y| < 1");
  const Moments m = run_samples(cfg, 1, [&](std::mt19937_64& rng, std::array<double, kDim>& out) {
    const StripExit e = sample_strip_exit(x, y, cfg, rng);
    out[0] = p == 2.0 ? e.x * e.x : std::pow(std::abs(e.x), p);
  });
  return m.estimate(0, cfg.master_seed);
}

Estimate strip_exit_time(double x, double y, const SimConfig& cfg) {
  cfg.validate();
  if (!(std::abs(y) < 1.0)) throw std::domain_error("strip_exit_time: needs |y| < 1");
  const Moments m = run_samples(cfg, 1, [&](std::mt19937_64& rng, std::array<double, kDim>& out) {
    out[0] = sample_strip_exit(x, y, cfg, rng).tau;
  });
  return m.estimate(0, cfg.master_seed);
}

OrthWeakReport weak_type_orth_check(double p, const SimConfig& cfg) {
  if (!(p >= 1.0 && p <= 2.0)) throw std::domain_error("weak_type_orth_check: needs 1 <= p <= 2");
  OrthWeakReport r;
  r.p = p;
  r.kpp = std::pow(kp(Exponent(p)).value, p);
  r.moment = strip_exit_moment(p, 0.0, 0.0, cfg);
  Estimate scaled = r.moment;
  scaled.mean *= r.kpp;
  scaled.std_error *= r.kpp;
  r.sharpness = make_check("orth_sharpness", p, scaled, 1.0, true);

  SimConfig twice = cfg;
  twice.n_samples = 2 * cfg.n_samples;
  const Estimate m2 = strip_exit_moment(p, 0.0, 0.0, twice);
  r.std_error_n = r.moment.std_error;
  r.std_error_2n = m2.std_error;
  r.std_error_ratio = m2.std_error / r.moment.std_error;
  return r;
}

// ---------------------------------------------------------------------------
// Random subordinate pairs

PairSpec random_pair_spec(std::mt19937_64& rng, int max_steps) {
  PairSpec s;
  std::uniform_int_distribution<int> steps(1, max_steps);
  std::uniform_real_distribution<double> up(0.1, 2.0);
  std::uniform_real_distribution<double> down(0.1, 0.95);
  std::uniform_real_distribution<double> theta(0.3, 2.0);
  std::bernoulli_distribution coin(0.5);
  s.n_steps = steps(rng);
  for (int k = 0; k < s.n_steps; ++k) {
    s.up.push_back(up(rng));
    s.down.push_back(down(rng));
    s.sign_above.push_back(coin(rng) ? 1 : -1);
    s.sign_below.push_back(coin(rng) ? 1 : -1);
  }
  s.theta = theta(rng);
  s.sign0 = coin(rng) ? 1 : -1;
  return s;
}

PairsReport random_subordinate_pair_check(double p, int pairs, const SimConfig& cfg) {
  cfg.validate();
  if (!((p > 0.0 && p < 1.0) || p >= 2.0)) {
    throw std::domain_error("random_subordinate_pair_check: needs 0 < p < 1 or p >= 2");
  }
  if (pairs < 1) throw ParameterError("random_subordinate_pair_check: needs pairs >= 1");
  PairsReport rep;
  rep.p = p;
  rep.bound = p < 1.0 ? std::pow(2.0, p) : weak_constant_pth_power(Exponent(p));
  rep.pairs = pairs;
  rep.paths_per_pair = cfg.n_samples;
  rep.results.resize(static_cast<std::size_t>(pairs));

  run_units(pairs, cfg.workers, [&](int idx) {
    std::mt19937_64 rng(sample_seed(cfg.master_seed, static_cast<std::uint64_t>(idx)));
    PairResult res;
    res.index = idx;
    res.spec = random_pair_spec(rng);
    const PairSpec& s = res.spec;
    const long n = cfg.n_samples;
    const int steps = s.n_steps;
    std::vector<double> gstar(static_cast<std::size_t>(n));
    std::vector<double> gabs(static_cast<std::size_t>(n * (steps + 1)));
    std::vector<double> fp(static_cast<std::size_t>(n * (steps + 1)));
    std::vector<double> up_prob(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) up_prob[k] = s.down[k] / (s.up[k] + s.down[k]);

    for (long i = 0; i < n; ++i) {
      double f = 1.0;
      double g = s.sign0 * f;
      double gmax = std::abs(g);
      const std::size_t row = static_cast<std::size_t>(i * (steps + 1));
      fp[row] = 1.0;
      gabs[row] = std::abs(g);
      for (int k = 0; k < steps; ++k) {
        const int v = f >= s.theta ? s.sign_above[k] : s.sign_below[k];
        const double df = uniform01(rng) < up_prob[k] ? f * s.up[k] : -f * s.down[k];
        f += df;
        g += v * df;
        if (f < 0.0) {
          std::ostringstream os;
          os << "random pair " << idx << ": f went negative at step " << k + 1;
          throw ConstructionError(os.str());
        }
        gmax = std::max(gmax, std::abs(g));
        fp[row + k + 1] = std::pow(f, p);
        gabs[row + k + 1] = std::abs(g);
      }
      gstar[static_cast<std::size_t>(i)] = gmax;
    }

    // ||f||_p^p = sup_n E f_n^p; keep the maximizing step for the error.
    int best_step = 0;
    double moment = -1.0;
    for (int k = 0; k <= steps; ++k) {
      double sum = 0.0;
      for (long i = 0; i < n; ++i) sum += fp[static_cast<std::size_t>(i * (steps + 1) + k)];
      if (sum / n > moment) {
        moment = sum / n;
        best_step = k;
      }
    }
    double var_f = 0.0;
    for (long i = 0; i < n; ++i) {
      const double d = fp[static_cast<std::size_t>(i * (steps + 1) + best_step)] - moment;
      var_f += d * d;
    }
    var_f /= static_cast<double>(n - 1 > 0 ? n - 1 : 1);
    res.moment = moment;

    std::vector<double> grid = cfg.lambda_grid;
    if (grid.empty()) {
      std::vector<double> sorted = gstar;
      std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
      const double med = std::max(sorted[static_cast<std::size_t>(n / 2)], 1e-12);
      for (int j = 0; j < 20; ++j) grid.push_back(med * 0.1 * std::pow(100.0, j / 19.0));
    }

    res.worst_sigma = -std::numeric_limits<double>::infinity();
    for (double lambda : grid) {
      long hits = 0;
      double f_hit = 0.0;
      for (long i = 0; i < n; ++i) {
        if (gstar[static_cast<std::size_t>(i)] >= lambda) {
          ++hits;
          f_hit += fp[static_cast<std::size_t>(i * (steps + 1) + best_step)];
        }
      }
      const double prob = static_cast<double>(hits) / n;
      const double lp = std::pow(lambda, p);
      const double ratio = lp * prob / moment;
      // Delta method for prob / moment with their sample covariance.
      const double var_p = prob * (1.0 - prob) / n;
      const double cov = (f_hit / n - prob * moment) / n;
      const double var_m = var_f / n;
      double rel_var = 0.0;
      if (prob > 0.0) rel_var = var_p / (prob * prob) + var_m / (moment * moment) - 2.0 * cov / (prob * moment);
      // With no hits the binomial error is taken at one hit.
      const double se = prob > 0.0 ? ratio * std::sqrt(std::max(rel_var, 0.0)) : lp / (n * moment);
      const double sigma = (ratio - rep.bound) / se;
      if (ratio > res.max_ratio) {
        res.max_ratio = ratio;
        res.lambda_at_max = lambda;
        res.std_error_at_max = se;
      }
      res.worst_sigma = std::max(res.worst_sigma, sigma);

      // Fixed-time version: sup_n lambda^p P(|g_n| >= lambda).
      for (int k = 0; k <= steps; ++k) {
        long hk = 0;
        for (long i = 0; i < n; ++i) hk += gabs[static_cast<std::size_t>(i * (steps + 1) + k)] >= lambda;
        res.max_ratio_fixed_n = std::max(res.max_ratio_fixed_n, lp * static_cast<double>(hk) / n / moment);
      }
    }
    rep.results[static_cast<std::size_t>(idx)] = std::move(res);
  });

  rep.worst_sigma = -std::numeric_limits<double>::infinity();
  for (const auto& r : rep.results) {
    rep.max_ratio = std::max(rep.max_ratio, r.max_ratio);
    rep.max_ratio_fixed_n = std::max(rep.max_ratio_fixed_n, r.max_ratio_fixed_n);
    rep.worst_sigma = std::max(rep.worst_sigma, r.worst_sigma);
    if (r.worst_sigma > 4.0) {
      ++rep.failures;
    } else if (r.worst_sigma > 3.0) {
      ++rep.warnings;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Extremal chain, sampled

ChainSampleReport sample_extremal_chain(const ExtremalParams& prm, const SimConfig& cfg) {
  cfg.validate();
  const ExtremalChain chain = build_extremal_chain(prm);
  const auto& w = chain.weights;
  const double p = prm.p;
  const double d = prm.delta;
  const int big_n = prm.n_steps;

  const Moments m = run_samples(cfg, 2, [&](std::mt19937_64& rng, std::array<double, kDim>& out) {
    double x = prm.x0;
    double y = (p - 1.0) * prm.x0;
    for (int n = 0; n < big_n; ++n) {
      const double x2n = x;
      // Step 2n+1: stay on [0, p_{2n+1}] with probability p_{2n+1} / p_{2n}.
      if (uniform01(rng) * w[2 * n] < w[2 * n + 1]) {
        x += d * x2n;
        y += d * x2n;
      } else {
        y -= x2n;
        x = 0.0;
        out = {0.0, 0.0, 0.0};
        return;
      }
      // Step 2n+2: stay on [0, p_{2n+2}] with probability p_{2n+2} / p_{2n+1}.
      if (uniform01(rng) * w[2 * n + 1] < w[2 * n + 2]) {
        const double dx = -(1.0 - 2.0 / p) * d * x2n;
        x += dx;
        y -= dx;
      } else {
        const double dx = (1.0 + 4.0 / p * d - d) * x2n;
        x += dx;
        y -= dx;
        out = {0.0, std::pow(x, p), 0.0};
        return;
      }
    }
    if (uniform01(rng) < 0.5) {
      y += x;
      x += x;
    } else {
      y -= x;
      x = 0.0;
    }
    out = {y >= 1.0 - 1e-9 ? 1.0 : 0.0, std::pow(x, p), 0.0};
  });

  ChainSampleReport r;
  r.prob = m.estimate(0, cfg.master_seed);
  r.moment = m.estimate(1, cfg.master_seed);
  r.ratio = r.prob.mean / r.moment.mean;
  const double rel_var = m.mean_cov(0, 0) / (r.prob.mean * r.prob.mean) +
                         m.mean_cov(1, 1) / (r.moment.mean * r.moment.mean) -
                         2.0 * m.mean_cov(0, 1) / (r.prob.mean * r.moment.mean);
  r.ratio_std_error = r.ratio * std::sqrt(std::max(rel_var, 0.0));
  r.exact = evaluate_ratio(chain);
  Estimate e{r.ratio, r.ratio_std_error, r.prob.n, cfg.master_seed};
  r.agreement = make_check("chain_sampled_vs_exact", p, e, r.exact.ratio, true);
  return r;
}

// ---------------------------------------------------------------------------
// Harmonic rectangle

RectangleReport harmonic_rectangle_check(double p, double R, double eps, const SimConfig& cfg) {
  cfg.validate();
  if (!(R >= 5.0)) throw std::domain_error("harmonic_rectangle_check: needs R >= 5");
  if (!(eps > 0.0)) throw std::domain_error("harmonic_rectangle_check: needs eps > 0");
  if (!(p >= 1.0 && p <= 2.0)) throw std::domain_error("harmonic_rectangle_check: needs 1 <= p <= 2");

  const Moments m = run_samples(cfg, 2, [&](std::mt19937_64& rng, std::array<double, kDim>& out) {
    std::normal_distribution<double> normal;
    double x = 0.0;
    double y = 0.0;
    bool top = false;
    for (;;) {
      const double dy = 1.0 - std::abs(y);
      const double dx = R - std::abs(x);
      const double d = std::min(dx, dy);
      const double h = std::min(cfg.dt, std::max(cfg.dt_min, 0.25 * d * d));
      const double sq = std::sqrt(h);
      const double x1 = x + sq * normal(rng);
      const double y1 = y + sq * normal(rng);
      if (std::abs(y1) >= 1.0) {
        x = x1;
        top = true;
        break;
      }
      if (std::abs(x1) >= R) {
        x = std::copysign(R, x1);
        break;
      }
      // Bridge crossings of either pair of sides.
      const double ey = std::min(2.0 * (1.0 - y) * (1.0 - y1), 2.0 * (1.0 + y) * (1.0 + y1)) / h;
      const double ex = std::min(2.0 * (R - x) * (R - x1), 2.0 * (R + x) * (R + x1)) / h;
      if (ey < 50.0) {
        const double py = std::exp(-2.0 * (1.0 - y) * (1.0 - y1) / h) + std::exp(-2.0 * (1.0 + y) * (1.0 + y1) / h);
        if (uniform01(rng) < py) {
          x = x1;
          top = true;
          break;
        }
      }
      if (ex < 50.0) {
        const double pxu = std::exp(-2.0 * (R - x) * (R - x1) / h);
        const double pxl = std::exp(-2.0 * (R + x) * (R + x1) / h);
        const double u = uniform01(rng);
        if (u < pxu + pxl) {
          x = u < pxu ? R : -R;
          break;
        }
      }
      x = x1;
      y = y1;
    }
    out = {std::pow(std::abs(x), p), top ? 1.0 : 0.0, 0.0};
  });

  RectangleReport r;
  r.p = p;
  r.R = R;
  r.eps = eps;
  r.moment = m.estimate(0, cfg.master_seed);
  r.top_exit = m.estimate(1, cfg.master_seed);
  r.kpp = std::pow(kp(Exponent(p)).value, p);
  r.moment_check = make_check("rectangle_moment", p, r.moment, 1.0 / r.kpp, true);
  return r;
}

}  // namespace sharpweak
