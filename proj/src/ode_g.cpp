#include "sharpweak/ode_g.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sharpweak/bessel.hpp"
#include "sharpweak/errors.hpp"

namespace sharpweak {

namespace {

// Largest RK4 substep measured in units of the local decay rate.
constexpr double kStiffStep = 0.05;

std::string at(double t) {
  std::ostringstream os;
  os << std::setprecision(17) << t;
  return os.str();
}

std::vector<double> make_grid(double t0, double t_max, double step) {
  const auto cells = static_cast<std::size_t>(std::ceil((t_max - t0) / step - 1e-9));
  const std::size_t n = std::max<std::size_t>(cells, 1);
  const double width = (t_max - t0) / static_cast<double>(n);
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = t0 + width * static_cast<double>(i);
  grid.back() = t_max;
  return grid;
}

void check_build_args(double p, double t_max, double step, const char* who) {
  if (!(p > 2.0)) throw std::domain_error(std::string(who) + ": needs p > 2");
  if (!(t_max > 2.0 / p)) throw std::domain_error(std::string(who) + ": t_max must exceed 2/p");
  if (!(step > 0.0 && step <= 1e-3)) throw std::domain_error(std::string(who) + ": step must lie in (0, 1e-3]");
}

}  // namespace

double g_rhs(double p, double t, double g) {
  const double gap = t + 1.0 - g;
  return std::pow(p / 2.0, p + 1.0) * std::pow(t, p - 2.0) * gap * gap;
}

double default_t_max(double p) { return std::max(10.0, 20.0 / p); }

// ---------------------------------------------------------------------------
// GSolution

GSolution::GSolution(double p, std::vector<double> grid, std::vector<double> g, std::vector<double> gprime)
    : p_(p), grid_(std::move(grid)), g_(std::move(g)), gp_(std::move(gprime)) {
  if (grid_.size() < 2 || grid_.size() != g_.size() || grid_.size() != gp_.size()) {
    throw ConstructionError("GSolution: grid, values and slopes must have equal length >= 2");
  }
}

std::size_t GSolution::cell(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  if (!(t >= grid_.front() - slack && t <= grid_.back() + slack)) {
    throw std::domain_error("G table evaluated at t = " + at(t) + " outside [" + at(grid_.front()) + ", " +
                            at(grid_.back()) + "]");
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const auto i = static_cast<std::size_t>(std::distance(grid_.begin(), it));
  return std::clamp<std::size_t>(i, 1, grid_.size() - 1) - 1;
}

double GSolution::value(double t) const {
  const std::size_t i = cell(t);
  const double w = grid_[i + 1] - grid_[i];
  const double s = (t - grid_[i]) / w;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * g_[i] + (s3 - 2 * s2 + s) * w * gp_[i] + (-2 * s3 + 3 * s2) * g_[i + 1] +
         (s3 - s2) * w * gp_[i + 1];
}

double GSolution::derivative(double t) const {
  const std::size_t i = cell(t);
  const double w = grid_[i + 1] - grid_[i];
  const double s = (t - grid_[i]) / w;
  const double s2 = s * s;
  return (6 * s2 - 6 * s) * (g_[i] - g_[i + 1]) / w + (3 * s2 - 4 * s + 1) * gp_[i] + (3 * s2 - 2 * s) * gp_[i + 1];
}

double GSolution::inverse(double s) const {
  if (s == g_.front()) return grid_.front();
  const double slack = 1e-12 * std::max(1.0, std::abs(s));
  if (!(s >= g_.front() - slack && s <= g_.back() + slack)) {
    throw std::domain_error("h evaluated at s = " + at(s) + " outside [" + at(g_.front()) + ", " + at(g_.back()) +
                            "]");
  }
  const auto it = std::upper_bound(g_.begin(), g_.end(), s);
  const std::size_t i =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::distance(g_.begin(), it)), 1, g_.size() - 1) - 1;
  double lo = grid_[i];
  double hi = grid_[i + 1];
  double t = lo + (hi - lo) * std::clamp((s - g_[i]) / (g_[i + 1] - g_[i]), 0.0, 1.0);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = value(t) - s;
    if (f == 0.0) break;
    if (f > 0.0) hi = t; else lo = t;
    double next = t - f / derivative(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, t)) {
      t = next;
      break;
    }
    t = next;
  }
  return t;
}

void GSolution::check_invariants() const {
  const double t0 = 2.0 / p_;
  if (std::abs(grid_.front() - t0) > 1e-14) throw ConstructionError("G table does not start at 2/p");
  if (std::abs(g_.front() - 1.0) > 1e-10) throw ConstructionError("G(2/p) != 1");
  if (std::abs(gp_.front() - p_ / 2.0) > 1e-10 * p_) throw ConstructionError("G'(2/p) != p/2");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double t = grid_[i];
    if (i > 0 && !(grid_[i] > grid_[i - 1])) throw ConstructionError("grid not increasing at t = " + at(t));
    if (i > 0 && !(g_[i] > g_[i - 1])) throw ConstructionError("G not increasing at t = " + at(t));
    if (!(g_[i] < t + 1.0)) throw ConstructionError("G(t) >= t + 1 at t = " + at(t));
    if (!(gp_[i] >= 1.0)) throw ConstructionError("G'(t) < 1 at t = " + at(t));
  }
}

void GSolution::write_csv(std::ostream& os) const {
  os << "t,G,Gprime\n" << std::setprecision(17);
  for (std::size_t i = 0; i < grid_.size(); ++i) os << grid_[i] << ',' << g_[i] << ',' << gp_[i] << '\n';
}

// ---------------------------------------------------------------------------
// Runge-Kutta construction

GSolution build_g_rk(Exponent p_exp, double t_max, double step) {
  const double p = p_exp.value();
  check_build_args(p, t_max, step, "build_g_rk");
  const double c = std::pow(p / 2.0, p + 1.0);
  std::vector<double> grid = make_grid(2.0 / p, t_max, step);
  std::vector<double> g(grid.size());
  std::vector<double> gp(grid.size());
  g[0] = 1.0;
  gp[0] = p / 2.0;
  auto f = [&](double t, double y) { return g_rhs(p, t, y); };

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double t_end = grid[i + 1];
    double t = grid[i];
    double y = g[i];
    // Decay rate of t + 1 - G under the linearised flow.
    const double rate = 2.0 * c * std::pow(t_end, p - 2.0) * (t + 1.0 - y);
    const int sub = std::max(1, static_cast<int>(std::ceil((t_end - t) * rate / kStiffStep)));
    const double hs = (t_end - t) / sub;
    for (int j = 0; j < sub; ++j) {
      const double k1 = f(t, y);
      const double k2 = f(t + 0.5 * hs, y + 0.5 * hs * k1);
      const double k3 = f(t + 0.5 * hs, y + 0.5 * hs * k2);
      const double k4 = f(t + hs, y + hs * k3);
      y += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = (j + 1 == sub) ? t_end : t + hs;
    }
    g[i + 1] = y;
    gp[i + 1] = f(t_end, y);
    if (!(y < t_end + 1.0)) throw ConstructionError("build_g_rk: G reached t + 1 at t = " + at(t_end));
    if (!(y > g[i])) throw ConstructionError("build_g_rk: G stopped increasing at t = " + at(t_end));
    if (!(gp[i + 1] >= 1.0)) throw ConstructionError("build_g_rk: G' < 1 at t = " + at(t_end));
  }
  GSolution sol(p, std::move(grid), std::move(g), std::move(gp));
  sol.check_invariants();
  return sol;
}

// ---------------------------------------------------------------------------
// Bessel construction

BesselLinearization::BesselLinearization(double p) : p_(p), nu_((p - 1.0) / p) {
  if (!(p > 2.0)) throw std::domain_error("BesselLinearization: needs p > 2");
  // Basis solutions at t0 = 2/p with a1 = (1,0) and (0,1).
  const double t0 = 2.0 / p;
  const double z0 = z(t0);
  Eigen::Matrix2d m;
  a1_ = 1.0;
  a2_ = 0.0;
  m(0, 0) = k(t0);
  m(1, 0) = dk(t0);
  a1_ = 0.0;
  a2_ = 1.0;
  m(0, 1) = k(t0);
  m(1, 1) = dk(t0);
  const Eigen::Vector2d rhs(1.0, p * p / 4.0);
  const double det = m.determinant();
  if (!std::isfinite(det) || std::abs(det) <= 1e-12 * m.cwiseAbs().maxCoeff() * m.cwiseAbs().maxCoeff()) {
    throw ConstructionError("build_g_bessel: singular coefficient system at t = 2/p (z0 = " + at(z0) + ")");
  }
  const Eigen::Vector2d a = m.fullPivLu().solve(rhs);
  a1_ = a(0);
  a2_ = a(1);
}

double BesselLinearization::z(double t) const { return std::sqrt(std::pow(p_ / 2.0, p_ - 1.0) * std::pow(t, p_)); }

double BesselLinearization::k_scaled(double t) const {
  const double zt = z(t);
  const double s = a1_ * bessel_i_scaled(-nu_, zt) + a2_ * bessel_i_scaled(nu_, zt);
  return std::pow(t, (p_ - 1.0) / 2.0) * s;
}

double BesselLinearization::dk_scaled(double t) const {
  const double zt = z(t);
  const double a = (p_ - 1.0) / 2.0;
  const double s = a1_ * bessel_i_scaled(-nu_, zt) + a2_ * bessel_i_scaled(nu_, zt);
  const double ds = a1_ * bessel_i_prime_scaled(-nu_, zt) + a2_ * bessel_i_prime_scaled(nu_, zt);
  const double dz = 0.5 * p_ * zt / t;
  return std::pow(t, a) * (a / t * s + dz * ds);
}

double BesselLinearization::ddk_scaled(double t) const {
  const double c = std::pow(p_ / 2.0, p_ + 1.0);
  return ((p_ - 2.0) * dk_scaled(t) + c * std::pow(t, p_ - 1.0) * k_scaled(t)) / t;
}

double BesselLinearization::k(double t) const { return k_scaled(t) * std::exp(z(t)); }
double BesselLinearization::dk(double t) const { return dk_scaled(t) * std::exp(z(t)); }

double BesselLinearization::g(double t) const {
  const double c = std::pow(p_ / 2.0, p_ + 1.0);
  return t + 1.0 - dk_scaled(t) / (k_scaled(t) * c * std::pow(t, p_ - 2.0));
}

double BesselLinearization::g_prime(double t) const {
  // G = t + 1 - k'/(c t^{p-2} k); the common scale of k, k', k'' cancels.
  const double c = std::pow(p_ / 2.0, p_ + 1.0);
  const double q = dk_scaled(t) / k_scaled(t);
  const double r = ddk_scaled(t) / k_scaled(t);
  return 1.0 - (r - q * q - (p_ - 2.0) * q / t) / (c * std::pow(t, p_ - 2.0));
}

double ode_residual(const GSolution& sol) {
  const BesselLinearization lin(sol.p());
  const auto t = sol.grid();
  const auto g = sol.values();
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    worst = std::max(worst, std::abs(lin.g_prime(t[i]) - g_rhs(sol.p(), t[i], g[i])));
  }
  return worst;
}

GSolution build_g_bessel(Exponent p_exp, double t_max, double step) {
  const double p = p_exp.value();
  check_build_args(p, t_max, step, "build_g_bessel");
  const BesselLinearization lin(p);
  const double c = std::pow(p / 2.0, p + 1.0);
  std::vector<double> grid = make_grid(2.0 / p, t_max, step);
  std::vector<double> g(grid.size());
  std::vector<double> gp(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double k = lin.k_scaled(t);
    const double dk = lin.dk_scaled(t);
    const double ddk = lin.ddk_scaled(t);
    if (!(k > 0.0 && dk > 0.0 && ddk > 0.0)) {
      throw ConstructionError("build_g_bessel: k, k' or k'' not positive at t = " + at(t));
    }
    g[i] = t + 1.0 - dk / (k * c * std::pow(t, p - 2.0));
    gp[i] = g_rhs(p, t, g[i]);
  }
  GSolution sol(p, std::move(grid), std::move(g), std::move(gp));
  sol.check_invariants();
  return sol;
}

// ---------------------------------------------------------------------------
// h = G^{-1}

HSolution::HSolution(std::shared_ptr<const GSolution> g) : g_(std::move(g)) {
  if (!g_) throw std::invalid_argument("HSolution: null G table");
}

double h_of(const HSolution& sol, double s) { return sol.g().inverse(s); }

double h_prime(const HSolution& sol, double s) {
  if (!(s > 1.0)) throw std::domain_error("h_prime: needs s > 1");
  const double p = sol.p();
  const double h = h_of(sol, s);
  const double gap = h - s + 1.0;
  return std::pow(2.0 / p, p + 1.0) * std::pow(h, 2.0 - p) / (gap * gap);
}

}  // namespace sharpweak
