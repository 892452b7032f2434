#include "sharpweak/bessel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sharpweak {

namespace {

constexpr double kSeriesCutoff = 25.0;

void check_args(double alpha, double z) {
  if (!(alpha > -1.0)) throw std::domain_error("bessel_i: order must exceed -1");
  if (!(z >= 0.0)) throw std::domain_error("bessel_i: argument must be non-negative");
}

double series(double alpha, double z) {
  const double half = 0.5 * z;
  double term = std::pow(half, alpha) / std::tgamma(alpha + 1.0);
  if (z == 0.0) return term;
  const double q = half * half;
  double sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (k * (alpha + k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// e^{-z} I_a(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k prod_{j<=k} (4a^2 - (2j-1)^2) / (k! (8z)^k)
double asymptotic_scaled(double alpha, double z) {
  const double mu = 4.0 * alpha * alpha;
  double term = 1.0;
  double sum = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * z);
    const double mag = std::abs(term);
    if (mag > last) break;  // past the smallest term of the divergent tail
    sum += term;
    last = mag;
    if (mag < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

}  // namespace

double bessel_i(double alpha, double z) {
  check_args(alpha, z);
  return series(alpha, z);
}

double bessel_i_scaled(double alpha, double z) {
  check_args(alpha, z);
  if (z <= kSeriesCutoff) return series(alpha, z) * std::exp(-z);
  return asymptotic_scaled(alpha, z);
}

double bessel_i_prime_scaled(double alpha, double z) {
  check_args(alpha, z);
  if (!(z > 0.0)) throw std::domain_error("bessel_i_prime_scaled: needs z > 0");
  return bessel_i_scaled(alpha + 1.0, z) + (alpha / z) * bessel_i_scaled(alpha, z);
}

}  // namespace sharpweak
