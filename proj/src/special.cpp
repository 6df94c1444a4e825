#include "spectral/special.hpp"

#include <boost/math/special_functions/bernoulli.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spectral {

namespace {

double erfcx_continued_fraction(double x)
{
    // erfc(x) e^{x^2} = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), modified Lentz.
    const double tiny = 1e-300;
    double f = x;
    double c = x, d = 0.0;
    for (int n = 1; n < 500; ++n) {
        const double an = 0.5 * n;
        d = x + an * d;
        if (std::abs(d) < tiny) d = tiny;
        c = x + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / (std::sqrt(std::numbers::pi) * f);
}

}  // namespace

double erfcx(double x)
{
    if (x < 0) {
        if (x < -26.0) return std::numeric_limits<double>::infinity();
        return 2.0 * std::exp(x * x) - erfcx(-x);
    }
    if (x < 4.0) return std::exp(x * x) * std::erfc(x);
    return erfcx_continued_fraction(x);
}

double exp_times_erfc(double a, double x)
{
    if (x < 4.0) {
        const double e = std::erfc(x);
        if (e == 0.0) return 0.0;
        return std::exp(a + std::log(e));
    }
    return std::exp(a - x * x) * erfcx(x);
}

namespace {

template <typename T>
T hurwitz_em(T s, double a)
{
    if (!(a > 0)) throw std::domain_error("hurwitz_zeta: a must be positive");
    const int n = 24;
    const int m = 14;
    T sum = 0;
    for (int k = 0; k < n; ++k) sum += std::pow(T(k + a), -s);
    const double x = n + a;
    const T xs = std::pow(T(x), -s);
    sum += x * xs / (s - T(1)) + xs / T(2);
    // Bernoulli correction terms B_{2j}/(2j)! s(s+1)...(s+2j-2) x^{-s-2j+1}.
    T rising = s;
    double fact = 2.0;
    double xp = 1.0 / x;
    for (int j = 1; j <= m; ++j) {
        const double b = boost::math::bernoulli_b2n<double>(j);
        sum += T(b / fact) * rising * xs * xp;
        rising *= (s + T(2 * j - 1)) * (s + T(2 * j));
        fact *= (2.0 * j + 1) * (2.0 * j + 2);
        xp /= x * x;
    }
    return sum;
}

}  // namespace

double hurwitz_zeta(double s, double a)
{
    if (s == 1.0) throw std::domain_error("hurwitz_zeta: pole at s = 1");
    return hurwitz_em<double>(s, a);
}

std::complex<double> hurwitz_zeta(std::complex<double> s, double a)
{
    if (s == std::complex<double>(1.0, 0.0)) throw std::domain_error("hurwitz_zeta: pole at s = 1");
    return hurwitz_em<std::complex<double>>(s, a);
}

double hurwitz_zeta_derivative_at_zero(double a)
{
    return std::lgamma(a) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace spectral
