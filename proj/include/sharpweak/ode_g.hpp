#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "sharpweak/exponent.hpp"

namespace sharpweak {

// Right-hand side of the Riccati equation
//
//   G'(t) = (p/2)^{p+1} t^{p-2} (t + 1 - G(t))^2,   G(2/p) = 1,
//
// on [2/p, inf). Its increasing solution G and the inverse h = G^{-1}
// drive the p > 2 special function.
double g_rhs(double p, double t, double g);

// Default right end of the table: max(10, 20/p).
double default_t_max(double p);

// Tabulated G on a grid starting at 2/p, with cubic Hermite interpolation
// between nodes (values and slopes both match, so G' is continuous).
// Evaluation outside [2/p, t_max] throws std::domain_error.
class GSolution {
 public:
  GSolution(double p, std::vector<double> grid, std::vector<double> g, std::vector<double> gprime);

  double p() const { return p_; }
  double t_min() const { return grid_.front(); }
  double t_max() const { return grid_.back(); }
  double s_max() const { return g_.back(); }

  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return g_; }
  std::span<const double> derivatives() const { return gp_; }

  double value(double t) const;
  double derivative(double t) const;

  // Smallest t with G(t) = s, s in [1, s_max]; Newton on the Hermite cell
  // with a bisection safeguard.
  double inverse(double s) const;

  // Throws ConstructionError naming the first node that breaks
  // monotonicity, G < t + 1, G' >= 1, or the initial conditions.
  void check_invariants() const;

  // CSV with header "t,G,Gprime".
  void write_csv(std::ostream& os) const;

 private:
  std::size_t cell(double t) const;

  double p_;
  std::vector<double> grid_;
  std::vector<double> g_;
  std::vector<double> gp_;
};

// Classical RK4 on the Riccati equation. `step` is the table spacing; each
// cell is integrated in as many equal substeps as the local stiffness
// 2 (p/2)^{p+1} t^{p-2} (t+1-G) requires, so the table stays stable for
// large p where the solution hugs t + 1.
GSolution build_g_rk(Exponent p, double t_max, double step = 1e-3);

// The linearisation k'' = ((p-2)/t) k' + (p/2)^{p+1} t^{p-2} k of the
// Riccati equation, solved by
//
//   k = a1 t^{(p-1)/2} I_{-(p-1)/p}(z) + a2 t^{(p-1)/2} I_{(p-1)/p}(z),
//   z = sqrt((p/2)^{p-1} t^p),
//
// with k(2/p) = 1, k'(2/p) = p^2/4. Values are returned scaled by e^{-z}
// so that large t does not overflow; ratios such as k'/k are unaffected.
class BesselLinearization {
 public:
  explicit BesselLinearization(double p);

  double p() const { return p_; }
  double a1() const { return a1_; }
  double a2() const { return a2_; }

  double z(double t) const;
  double k_scaled(double t) const;
  double dk_scaled(double t) const;
  // From the ODE: t k'' = (p-2) k' + (p/2)^{p+1} t^{p-1} k.
  double ddk_scaled(double t) const;

  // Unscaled values; overflow for large z.
  double k(double t) const;
  double dk(double t) const;

  // G(t) = t + 1 - (2/p)^{p+1} k'(t) / (k(t) t^{p-2}).
  double g(double t) const;
  double g_prime(double t) const;

 private:
  double p_;
  double nu_;
  double a1_ = 0.0;
  double a2_ = 0.0;
};

// G from the Bessel closed form, tabulated on the same kind of grid as
// build_g_rk. Throws ConstructionError if the coefficient system is
// singular or k, k', k'' fail to stay positive.
GSolution build_g_bessel(Exponent p, double t_max, double step = 1e-3);

// Largest |G'(t_i) - rhs(t_i, G_i)| over the grid nodes of a table, with
// G' the analytic derivative of the Bessel closed form. Independent of the
// slopes stored in the table.
double ode_residual(const GSolution& sol);

// h = G^{-1} on [1, s_max], sharing an immutable G table.
class HSolution {
 public:
  explicit HSolution(std::shared_ptr<const GSolution> g);

  double p() const { return g_->p(); }
  double s_min() const { return 1.0; }
  double s_max() const { return g_->s_max(); }
  const GSolution& g() const { return *g_; }

 private:
  std::shared_ptr<const GSolution> g_;
};

// h(s); h(1) = 2/p exactly. Throws std::domain_error outside [1, s_max].
double h_of(const HSolution& sol, double s);

// h'(s) = (2/p)^{p+1} h(s)^{2-p} (h(s) - s + 1)^{-2}, for s > 1.
double h_prime(const HSolution& sol, double s);

}  // namespace sharpweak
