#pragma once

namespace sharpweak {

// Modified Bessel function of the first kind by its power series
//
//   I_a(z) = sum_k (z/2)^{2k+a} / (k! Gamma(a+k+1)),
//
// valid for a > -1 and z >= 0. All terms are positive, so the sum is
// accurate to a few ulps wherever it does not overflow (z up to ~700).
double bessel_i(double alpha, double z);

// e^{-z} I_a(z). Uses the series for z <= 25 and the large-argument
// expansion above that; the exponentially small K_a component dropped by
// the expansion is below 1e-21 relative there.
double bessel_i_scaled(double alpha, double z);

// e^{-z} I_a'(z), from I_a' = I_{a+1} + (a/z) I_a. Needs z > 0.
double bessel_i_prime_scaled(double alpha, double z);

}  // namespace sharpweak
