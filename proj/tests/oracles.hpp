#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here calls into the library.

#include <cmath>
#include <cstdint>

namespace oracle {

inline constexpr double kCatalan = 0.915965594177219015054603514932384110774;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// sum_{k<n} (-1)^k (2k+1)^{-s}, averaged with the next partial sum. For an
// alternating series with decreasing terms the average cancels the leading
// error term, leaving O(n^{-s-1}).
inline long double alternating_odd_sum(double s, std::int64_t n) {
  long double sum = 0.0L;
  for (std::int64_t k = n - 1; k >= 0; --k) {
    const long double t = std::pow(2.0L * static_cast<long double>(k) + 1.0L, -static_cast<long double>(s));
    sum += (k % 2 == 0) ? t : -t;
  }
  const long double next = std::pow(2.0L * static_cast<long double>(n) + 1.0L, -static_cast<long double>(s));
  const long double after = sum + ((n % 2 == 0) ? next : -next);
  return 0.5L * (sum + after);
}

// sum_k (2k+1)^{-2}: n terms plus the midpoint-rule tail 1/(4n), which is
// off by O(n^{-3}).
inline long double odd_inverse_squares(std::int64_t n) {
  long double sum = 0.0L;
  for (std::int64_t k = n - 1; k >= 0; --k) {
    const long double d = 2.0L * static_cast<long double>(k) + 1.0L;
    sum += 1.0L / (d * d);
  }
  return sum + 1.0L / (4.0L * static_cast<long double>(n));
}

// K_p from brute summation of both series, n terms each.
inline double kp_brute(double p, std::int64_t n) {
  const long double num = odd_inverse_squares(n);
  const long double den = alternating_odd_sum(p + 1.0, n);
  const long double kpp = std::pow(static_cast<long double>(kPi) / 2.0L, static_cast<long double>(p) - 1.0L) * num /
                          (std::tgamma(static_cast<long double>(p) + 1.0L) * den);
  return static_cast<double>(std::pow(kpp, 1.0L / static_cast<long double>(p)));
}

// Power series of I_a(z) summed in long double until terms stop mattering.
inline double bessel_i_series(double a, double z) {
  const long double half = static_cast<long double>(z) / 2.0L;
  long double term = std::pow(half, static_cast<long double>(a)) / std::tgamma(static_cast<long double>(a) + 1.0L);
  long double sum = term;
  for (int k = 1; k < 2000; ++k) {
    term *= half * half / (static_cast<long double>(k) * (static_cast<long double>(a) + k));
    sum += term;
    if (term < sum * 1e-21L) break;
  }
  return static_cast<double>(sum);
}

inline double weak_pth_power(double p) { return std::pow(p, p) / (std::pow(2.0, p) * (p - 1.0)); }

}  // namespace oracle
