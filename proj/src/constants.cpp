#include "sharpweak/constants.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sharpweak {

namespace {

constexpr double kPi = std::numbers::pi;

void require_range(double p, double lo, double hi, const char* what) {
  if (!(p >= lo && p <= hi)) {
    throw std::domain_error(std::string(what) + ": p = " + std::to_string(p) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

double gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma: argument must be positive");
  return std::tgamma(x);
}

AlternatingSum dirichlet_beta(double s, double tol) {
  if (!(tol > 0.0)) throw std::domain_error("dirichlet_beta: tol must be positive");
  if (!(s > 0.0)) throw std::domain_error("dirichlet_beta: s must be positive");
  double sum = 0.0;
  int k = 0;
  for (;; ++k) {
    const double term = std::pow(2.0 * k + 1.0, -s);
    if (term < tol) break;
    sum += (k % 2 == 0) ? term : -term;
  }
  return {sum, k};
}

SharpConstant kp(Exponent p_exp, double tol) {
  const double p = p_exp.value();
  require_range(p, 1.0, 2.0, "kp");
  const AlternatingSum beta = dirichlet_beta(p + 1.0, tol / 4.0);
  const double odd_squares = kPi * kPi / 8.0;
  const double kpp = std::pow(kPi / 2.0, p - 1.0) * odd_squares / (gamma(p + 1.0) * beta.value);
  return {std::pow(kpp, 1.0 / p), "K_p (orthogonal weak-type)", p, beta.terms};
}

SharpConstant weak_constant_nonneg(Exponent p_exp) {
  const double p = p_exp.value();
  if (p < 1.0) return {2.0, "weak-type, f >= 0, p < 1", p, 0};
  if (p >= 2.0) {
    return {(p / 2.0) * std::pow(p - 1.0, -1.0 / p), "weak-type, f >= 0, p >= 2", p, 0};
  }
  throw std::domain_error("weak_constant_nonneg: no sharp constant for 1 <= p < 2");
}

double weak_constant_pth_power(Exponent p_exp) {
  const double p = p_exp.value();
  if (p < 2.0) throw std::domain_error("weak_constant_pth_power: needs p >= 2");
  return std::pow(p, p) / (std::pow(2.0, p) * (p - 1.0));
}

double nonneg_strong_constant(Exponent p_exp) {
  const double p = p_exp.value();
  if (!(p > 1.0)) throw std::domain_error("nonneg_strong_constant: needs p > 1");
  if (p <= 2.0) return 1.0 / (p - 1.0);
  return std::pow(p * (p - 1.0) / 2.0, 1.0 / p);
}

std::vector<SharpConstant> reference_constants(Exponent p_exp) {
  const double p = p_exp.value();
  std::vector<SharpConstant> out;
  if (p >= 1.0 && p <= 2.0) {
    out.push_back({2.0 / gamma(p + 1.0), "weak-type 2/Gamma(p+1), 1 <= p <= 2", p, 0});
  }
  if (p > 1.0) {
    out.push_back({Exponent(p, Regime::General).conjugate_max() - 1.0, "strong-type p*-1, 1 < p < inf", p, 0});
    out.push_back({nonneg_strong_constant(p_exp), "strong-type C_p, f >= 0, 1 < p < inf", p, 0});
  }
  if (p >= 2.0) {
    out.push_back({std::pow(std::pow(p, p - 1.0) / 2.0, 1.0 / p), "weak-type (p^{p-1}/2)^{1/p}, p >= 2", p, 0});
  }
  return out;
}

}  // namespace sharpweak
