#include "spectral/dirac_models.hpp"
#include "spectral/eta_zeta.hpp"
#include "spectral/io.hpp"

#include <doctest.h>

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/polygamma.hpp>

#include <numbers>
#include <random>

using namespace spectral;
using std::numbers::pi;

namespace {

// zeta(s, a) for integer s >= 2 through polygamma: psi^{(s-1)}(a) = (-1)^s (s-1)! zeta(s, a)
double hurwitz_int(int s, double a)
{
    return boost::math::polygamma(s - 1, a) * ((s % 2 == 0) ? 1.0 : -1.0) / std::tgamma(double(s));
}

}  // namespace

TEST_CASE("finite partial sums")
{
    const auto f = SpectrumFamily::explicit_spectrum({1.0, -2.0, 3.0}, {1, 2, 1});
    const auto p = eta_partial_sum(f, 1.0);
    CHECK(p.value.real() == doctest::Approx(1 - 2 * 0.5 + 1.0 / 3));
    CHECK(p.value.imag() == doctest::Approx(0.0));
    CHECK(p.terms == 4);  // with multiplicity
    const auto z = eta_partial_sum(f, 0.0);
    CHECK(z.value.real() == doctest::Approx(1 - 2 + 1));
}

TEST_CASE("arithmetic family: Hurwitz values at integer s")
{
    for (double a : {0.1, 0.35, 0.5, 0.8}) {
        for (int s : {2, 3, 4}) {
            const double oracle = hurwitz_int(s, a) - hurwitz_int(s, 1 - a);
            const auto p = eta_partial_sum(SpectrumFamily::arithmetic(a), double(s), 4000);
            CHECK(std::abs(p.value.real() - oracle) <= std::max(p.tail_bound, 1e-12) + 1e-10);
        }
        const auto c = eta_partial_sum(SpectrumFamily::arithmetic(a), 0.0, 1000, true);
        CHECK(c.value.real() == doctest::Approx(1 - 2 * a).epsilon(1e-10));
    }
    CHECK_THROWS_AS(eta_partial_sum(SpectrumFamily::arithmetic(0.3), 0.5), EtaError);
}

TEST_CASE("erfc signed sum against direct evaluation")
{
    const std::vector<double> v{-3.0, -0.5, 0.7, 2.0, 4.5};
    const std::vector<int> m{1, 2, 1, 3, 1};
    const auto f = SpectrumFamily::explicit_spectrum(v, m);
    for (double t : {1e-3, 0.1, 2.0}) {
        double oracle = 0;
        for (size_t i = 0; i < v.size(); ++i) oracle += m[i] * (v[i] > 0 ? 1 : -1) * std::erfc(std::abs(v[i]) * std::sqrt(t));
        CHECK(erfc_signed_sum(f, t, 0) == doctest::Approx(oracle).epsilon(1e-14));
    }
}

TEST_CASE("circle eta: erfc extrapolation agrees with the Hurwitz oracle")
{
    for (double a : {0.05, 0.2, 0.5, 0.73, 0.95}) {
        const auto spec = SpectrumFamily::arithmetic(a);
        const auto h = eta_invariant(spec, {EtaMethod::hurwitz_oracle});
        const auto e = eta_invariant(spec, {EtaMethod::erfc_extrapolation});
        CHECK(h.eta0 == doctest::Approx(1 - 2 * a).epsilon(1e-12));
        CHECK(std::abs(e.eta0 - h.eta0) <= 1e-6);
        CHECK(std::abs(centered_mod_one(e.eta0 + 2 * a)) <= 1e-6);
        CHECK(e.error_estimate <= 1e-6);
        CHECK(e.t_grid.size() == e.g_values.size());
    }
    // integer shifts have a kernel; the arithmetic family refuses them
    CHECK_THROWS_AS(SpectrumFamily::arithmetic(0.0), std::invalid_argument);
}

TEST_CASE("finite spectra: signed count, zero modes excluded")
{
    const auto f = SpectrumFamily::explicit_spectrum({-1.0, 0.0, 2.0, 5.0}, {2, 1, 1, 2});
    const auto r = eta_invariant(f);
    CHECK(r.eta0 == doctest::Approx(1.0));
    CHECK(r.zero_modes == 1);
    CHECK(r.mod_z_class == doctest::Approx(0.0));
    CHECK(eta_invariant(f, {EtaMethod::erfc_extrapolation}).eta0 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("symmetric spectra have vanishing eta")
{
    const TangentialModel t{{1.0, 2.0}, {1, 2}};
    CHECK(eta_invariant(torus_spectrum(t, 6.0, 40)).eta0 == doctest::Approx(0.0));
    const auto cyl = aps_cylinder_spectrum(CylinderModel::aps_both_ends(t, 3.0));
    CHECK(std::abs(eta_invariant(cyl).eta0) <= 1e-6);
}

TEST_CASE("mod one helpers")
{
    CHECK(fractional_part(2.25) == doctest::Approx(0.25));
    CHECK(fractional_part(-0.25) == doctest::Approx(0.75));
    CHECK(centered_mod_one(0.75) == doctest::Approx(-0.25));
    CHECK(centered_mod_one(-3.1) == doctest::Approx(-0.1));
    CHECK(centered_mod_one(0.5) == doctest::Approx(-0.5));
}

TEST_CASE("zeta(0) counts nonzero eigenvalues on finite spectra")
{
    const auto f = SpectrumFamily::explicit_spectrum({-1.0, 2.0, 3.0}, {1, 2, 1});
    CHECK(zeta0(f, false).zeta0 == doctest::Approx(4.0));
    CHECK(zeta0(f, true).zeta0 == doctest::Approx(4.0));
    const auto k = SpectrumFamily::explicit_spectrum({0.0, 2.0});
    CHECK_THROWS_AS(zeta0(k, false), ZetaError);
    CHECK(zeta0(k, false, true).zeta0 == doctest::Approx(1.0));
    // circle: zeta_{|D|}(0) = zeta(0, a) + zeta(0, 1 - a) = 0
    CHECK(zeta0(SpectrumFamily::arithmetic(0.3), false).zeta0 == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("finite determinants equal the product; branches are conjugate")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.3, 4.0);
    for (int n : {1, 3, 6}) {
        std::vector<double> v;
        double prod = 1;
        int negatives = 0;
        for (int i = 0; i < n; ++i) {
            const double x = (i % 2 ? -1 : 1) * u(rng);
            v.push_back(x);
            prod *= x;
            negatives += x < 0;
        }
        const auto f = SpectrumFamily::explicit_spectrum(v);
        const auto plus = zeta_determinant(f, false, Branch::plus_i_pi);
        const auto minus = zeta_determinant(f, false, Branch::minus_i_pi);
        CHECK(std::abs(plus.determinant() - prod) <= 1e-12 * std::abs(prod));
        CHECK(std::abs(minus.determinant() - prod) <= 1e-12 * std::abs(prod));
        CHECK(plus.phase == doctest::Approx(-minus.phase));
        CHECK(std::abs(plus.phase) == doctest::Approx(pi * negatives));
        const auto sq = zeta_determinant(f, true);
        CHECK(sq.phase == 0.0);
        CHECK(std::exp(sq.log_det_modulus) == doctest::Approx(prod * prod).epsilon(1e-12));
    }
}

TEST_CASE("circle determinant of D^2 is (2 sin pi a)^2")
{
    for (double a : {0.2, 0.5, 0.7}) {
        const auto m = mellin_zeta_continuation(SpectrumFamily::arithmetic(a));
        CHECK(m.zeta0 == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(m.zeta_prime0 == doctest::Approx(-2 * std::log(2 * std::sin(pi * a))).epsilon(1e-7));
    }
}

TEST_CASE("scaling: eta is invariant, log det shifts by zeta(0) log c")
{
    const std::vector<double> v{-1.5, 0.4, 2.0, 7.0};
    const auto f = SpectrumFamily::explicit_spectrum(v);
    for (double c : {0.5, 3.0}) {
        std::vector<double> w;
        for (double x : v) w.push_back(c * x);
        const auto g = SpectrumFamily::explicit_spectrum(w);
        CHECK(eta_invariant(g).eta0 == doctest::Approx(eta_invariant(f).eta0));
        const auto df = zeta_determinant(f, true), dg = zeta_determinant(g, true);
        CHECK(dg.log_det_modulus - df.log_det_modulus == doctest::Approx(2 * std::log(c) * dg.zeta0));
    }
}

TEST_CASE("partition function against Gaussian integrals on rotated contours")
{
    boost::math::quadrature::sinh_sinh<double> ss;
    for (double lam : {0.5, 1.0, 2.5, -1.0, -2.5}) {
        CMatrix<double> m(1, 1);
        m(0, 0) = lam;
        // lambda > 0: int e^{-lambda x^2} dx; lambda < 0: x = i y turns it into i int e^{lambda y^2} dy
        const double mag = ss.integrate([&](double y) { return std::exp(-std::abs(lam) * y * y); });
        const std::complex<double> oracle = lam > 0 ? std::complex<double>(mag) : std::complex<double>(0, mag);
        CHECK(std::abs(partition_function(HermitianOperator<double>(m)) - oracle) <= 1e-10);
    }
    // direct sums multiply, unitary conjugation does nothing
    Eigen::VectorXd d(3);
    d << 1.5, -0.7, 2.0;
    std::complex<double> prod = 1;
    for (int i = 0; i < 3; ++i) {
        CMatrix<double> m(1, 1);
        m(0, 0) = d(i);
        prod *= partition_function(HermitianOperator<double>(m));
    }
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    CMatrix<double> z(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) z(i, j) = {g(rng), g(rng)};
    const CMatrix<double> w = Eigen::HouseholderQR<CMatrix<double>>(z).householderQ();
    const HermitianOperator<double> t(w.adjoint() * d.cast<Complex<double>>().asDiagonal() * w, 1e-10);
    CHECK(std::abs(partition_function(t) - prod) <= 1e-12);
    CHECK_THROWS_AS(partition_function(HermitianOperator<double>(CMatrix<double>::Zero(2, 2))), ZetaError);
}

TEST_CASE("small-t signed heat trace stays O(sqrt t)")
{
    for (double a : {0.1, 0.5, 0.9}) {
        const auto spec = SpectrumFamily::arithmetic(a);
        for (double t : {1e-2, 0.3}) {
            double oracle = 0;
            for (int k = -400; k <= 400; ++k) oracle += (k + a) * std::exp(-t * (k + a) * (k + a));
            CHECK(signed_heat_trace(spec, t) == doctest::Approx(oracle).epsilon(1e-10));
        }
        const auto b = small_t_trace_bound(spec);
        CHECK(std::isfinite(b.supremum));
        CHECK(b.supremum < 1.0);
        CHECK(b.t_grid.size() == 41);
    }
}

TEST_CASE("eta result JSON")
{
    const auto r = eta_invariant(SpectrumFamily::arithmetic(0.25), {EtaMethod::hurwitz_oracle});
    const auto j = to_json(r);
    CHECK(j["method"] == to_string(EtaMethod::hurwitz_oracle));
    CHECK(j["value"].get<double>() == doctest::Approx(0.5));
    CHECK(j.contains("mod_z"));
}
