#pragma once

#include <complex>

namespace spectral {

// e^{x^2} erfc(x); continued fraction for x >= 4, direct product below.
double erfcx(double x);

// e^{a} erfc(x) without overflow or underflow in the intermediate factors.
double exp_times_erfc(double a, double x);

// Hurwitz zeta sum_{k>=0} (k+a)^{-s}, real s != 1, a > 0, by Euler-Maclaurin.
double hurwitz_zeta(double s, double a);

// Complex-s version for Re(s) > 1 or any s away from 1 (Euler-Maclaurin, same scheme).
std::complex<double> hurwitz_zeta(std::complex<double> s, double a);

// d/ds zeta_H(s, a) at s = 0 via Lerch: log Gamma(a) - log(2 pi)/2.
double hurwitz_zeta_derivative_at_zero(double a);

}  // namespace spectral
