#include "spectral/aps_heat.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace spectral;
using std::numbers::pi;

namespace {

constexpr double h = 1e-3;

double d_dt(const std::function<double(double)>& f, double t)
{
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}

double d2(const std::function<double(double)>& f, double x)
{
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

// one-sided fourth-order first derivative at x
double d_right(const std::function<double(double)>& f, double x)
{
    return (-25 * f(x) + 48 * f(x + h) - 36 * f(x + 2 * h) + 16 * f(x + 3 * h) - 3 * f(x + 4 * h)) / (12 * h);
}

// sum_n e^{-a(2n+1)t} psi_n(x) psi_n(y) over normalized Hermite functions of -d^2 + a^2 x^2
double hermite_kernel(double a, double x, double y, double t, int terms = 60)
{
    const double sx = std::sqrt(a) * x, sy = std::sqrt(a) * y;
    const double c = std::sqrt(std::sqrt(a / pi));
    double px0 = c * std::exp(-sx * sx / 2), py0 = c * std::exp(-sy * sy / 2);
    double px1 = std::sqrt(2.0) * sx * px0, py1 = std::sqrt(2.0) * sy * py0;
    double sum = std::exp(-a * t) * px0 * py0 + std::exp(-3 * a * t) * px1 * py1;
    for (int n = 1; n + 1 < terms; ++n) {
        const double px2 = std::sqrt(2.0 / (n + 1)) * sx * px1 - std::sqrt(double(n) / (n + 1)) * px0;
        const double py2 = std::sqrt(2.0 / (n + 1)) * sy * py1 - std::sqrt(double(n) / (n + 1)) * py0;
        sum += std::exp(-a * (2 * n + 3) * t) * px2 * py2;
        px0 = px1;
        px1 = px2;
        py0 = py1;
        py1 = py2;
    }
    return sum;
}

}  // namespace

TEST_CASE("mode kernels solve the heat equation with their boundary condition")
{
    double pde = 0, bc = 0;
    for (double lam : {-2.0, -0.6, 0.0, 0.8, 2.5})
        for (auto var : {KernelVariant::forward, KernelVariant::adjoint}) {
            const ModeHeatKernel k{lam, var};
            for (double t : {0.05, 0.4, 3.0})
                for (double v : {0.1, 0.9}) {
                    for (double u : {0.2, 0.7, 2.0}) {
                        const double lhs = d_dt([&](double s) { return mode_heat_kernel(k, s, u, v); }, t);
                        const double rhs = d2([&](double x) { return mode_heat_kernel(k, t, x, v); }, u) -
                                           lam * lam * mode_heat_kernel(k, t, u, v);
                        pde = std::max(pde, std::abs(lhs - rhs));
                    }
                    auto at = [&](double x) { return mode_heat_kernel(k, t, x, v); };
                    const double r = k.dirichlet() ? at(0) : d_right(at, 0) + k.robin_coefficient() * at(0);
                    bc = std::max(bc, std::abs(r));
                }
        }
    CHECK(pde <= 1e-5);
    CHECK(bc <= 1e-6);
}

TEST_CASE("boundary condition bookkeeping")
{
    CHECK(ModeHeatKernel{1.0, KernelVariant::forward}.dirichlet());
    CHECK(ModeHeatKernel{0.0, KernelVariant::forward}.dirichlet());
    CHECK_FALSE(ModeHeatKernel{-1.0, KernelVariant::forward}.dirichlet());
    CHECK(ModeHeatKernel{-1.0, KernelVariant::forward}.robin_coefficient() == -1.0);
    CHECK(ModeHeatKernel{-1.0, KernelVariant::adjoint}.dirichlet());
    CHECK(ModeHeatKernel{2.0, KernelVariant::adjoint}.robin_coefficient() == -2.0);
}

TEST_CASE("kernels are symmetric and approach the delta function")
{
    for (double lam : {-1.5, 0.0, 1.5})
        for (auto var : {KernelVariant::forward, KernelVariant::adjoint}) {
            const ModeHeatKernel k{lam, var};
            for (double t : {0.1, 1.0})
                CHECK(mode_heat_kernel(k, t, 0.3, 1.2) == doctest::Approx(mode_heat_kernel(k, t, 1.2, 0.3)).epsilon(1e-13));
            // far from the boundary the kernel integrates to ~1 at small t
            const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                [&](double u) { return mode_heat_kernel(k, 1e-3, u, 2.0); }, 1.5, 2.5);
            CHECK(mass == doctest::Approx(std::exp(-lam * lam * 1e-3)).epsilon(1e-8));
        }
}

TEST_CASE("eta density is the diagonal difference of forward and adjoint kernels")
{
    const auto model = EtaDensity::explicit_spectrum({-1.2, 0.5, 2.0}, {1, 2, 1});
    auto withzero = model;
    withzero.m0 = 1;
    for (double t : {0.01, 0.3, 2.0})
        for (double u : {0.0, 0.05, 0.4, 1.5}) {
            auto diff = [&](double lam) {
                return mode_heat_kernel({lam, KernelVariant::forward}, t, u, u) -
                       mode_heat_kernel({lam, KernelVariant::adjoint}, t, u, u);
            };
            const double oracle = diff(-1.2) + 2 * diff(0.5) + diff(2.0);
            CHECK(eta_density(model, t, u) == doctest::Approx(oracle).epsilon(1e-12).scale(1.0));
            CHECK(eta_density(withzero, t, u) == doctest::Approx(oracle + diff(0.0)).epsilon(1e-12).scale(1.0));
        }
}

TEST_CASE("trace of the density")
{
    const auto model = EtaDensity::explicit_spectrum({1.0, -0.5, 2.0, 3.0}, {1, 2, 1, 1});
    for (double t : {1e-3, 0.1, 1.0, 5.0})
        CHECK(eta_trace(model, t) == doctest::Approx(eta_density_integral(model, t)).epsilon(1e-10).scale(1.0));
    // t -> 0: -1/2 of the signed count; t -> infinity: 0
    CHECK(eta_trace(model, 1e-14) == doctest::Approx(-0.5 * (1 - 2 + 1 + 1)).epsilon(1e-6));
    CHECK(std::abs(eta_trace(model, 200.0)) <= 1e-20);
    auto zero = model;
    zero.m0 = 2;
    CHECK(eta_trace(zero, 50.0) == doctest::Approx(-1.0));
}

TEST_CASE("Mellin identity for the eta function")
{
    for (const auto& model : {EtaDensity::explicit_spectrum({1.0}), EtaDensity::explicit_spectrum({-2.0, 0.7}, {1, 3}),
                              EtaDensity::explicit_spectrum({1.0, -0.5, 2.0, 3.0}, {1, 2, 1, 1})})
        for (double s : {0.3, 0.75, 1.2}) {
            const auto c = mellin_eta_identity_check(model, s);
            // independent rhs: -Gamma(s + 1/2)/(2 s sqrt(pi)) sum m sign |lambda|^{-2s}
            double eta = 0;
            for (size_t i = 0; i < model.spectrum.size(); ++i)
                eta += model.multiplicity(i) * (model.spectrum[i] > 0 ? 1 : -1) * std::pow(std::abs(model.spectrum[i]), -2 * s);
            const double rhs = -std::tgamma(s + 0.5) / (2 * s * std::sqrt(pi)) * eta;
            CHECK(c.rhs == doctest::Approx(rhs).epsilon(1e-12));
            CHECK(c.gap <= 1e-9);
        }
    // single lambda = 1 at s = 1/2: -Gamma(1)/sqrt(pi)
    CHECK(mellin_eta_identity_check(EtaDensity::explicit_spectrum({1.0}), 0.5).lhs ==
          doctest::Approx(-1 / std::sqrt(pi)).epsilon(1e-9));
    CHECK_THROWS_AS(mellin_eta_identity_check(EtaDensity::explicit_spectrum({1.0}), 2.5), HeatError);
}

TEST_CASE("Mehler kernel against the Hermite expansion")
{
    for (double a : {0.5, 1.0, 2.0})
        for (double t : {0.5, 1.0, 2.0})
            for (double x : {-1.0, 0.0, 0.6})
                for (double y : {-0.3, 0.9})
                    CHECK(mehler_kernel(a, x, y, t) == doctest::Approx(hermite_kernel(a, x, y, t)).epsilon(1e-10));
    // a = 0 is the free heat kernel
    CHECK(mehler_kernel(0.0, 0.2, -0.5, 0.7) ==
          doctest::Approx(std::exp(-0.49 / 2.8) / std::sqrt(4 * pi * 0.7)).epsilon(1e-12));
    CHECK(mehler_kernel(1e-9, 0.2, -0.5, 0.7) == doctest::Approx(mehler_kernel(0.0, 0.2, -0.5, 0.7)).epsilon(1e-8));
}

TEST_CASE("Mehler kernel solves its heat equation")
{
    double worst = 0;
    for (double a : {0.5, 1.5})
        for (double t : {0.1, 1.0})
            for (double x : {-0.8, 0.4}) {
                const double y = 0.3;
                const double kt = d_dt([&](double s) { return mehler_kernel(a, x, y, s); }, t);
                const double kxx = d2([&](double z) { return mehler_kernel(a, z, y, t); }, x);
                worst = std::max(worst, std::abs(kt - kxx + a * a * x * x * mehler_kernel(a, x, y, t)));
            }
    CHECK(worst <= 1e-5);
}

TEST_CASE("supertrace Tr(sigma B e^{-t B^2}) vanishes on realized models")
{
    const TangentialModel m{{0.5, 1.0, 3.0}, {2, 1, 1}};
    const auto r = realize(m);
    for (double t : {0.01, 0.5, 2.0}) {
        const auto res = spectral_resolution(HermitianOperator<double>(r.B));
        const CMatrix<double> heat =
            apply_function(res, [t](double x) { return std::exp(-t * x * x); });
        CHECK(std::abs((r.sigma * r.B * heat).trace()) <= 1e-14);
    }
}

TEST_CASE("product cylinder index")
{
    const TangentialModel t{{1.0, 2.0}, {1, 2}};
    for (double R : {0.5, 4.0}) {
        const auto p = aps_index_product_model(CylinderModel::aps_both_ends(t, R));
        CHECK(p.index == 0);
        CHECK(p.eta_boundary == doctest::Approx(0.0));
        CHECK(p.kernel - p.cokernel == p.index);
        CHECK(p.mode_count_index == p.index);
    }
    const auto asym = aps_index_product_model(EtaDensity::explicit_spectrum({1.0, 2.5, -0.7}, {2, 1, 1}), 3.0);
    CHECK(asym.index == 0);
    CHECK(asym.residual == doctest::Approx(0.0));
    CHECK(asym.kernel == 0);
    CHECK(asym.cokernel == 0);
    auto shifted = CylinderModel::aps_both_ends(t, 2.0);
    shifted.shifts.push_back({0.0, 1.0, {0.5}});
    CHECK_THROWS_AS(aps_index_product_model(shifted), HeatError);
}

TEST_CASE("index pasting: i(P2, I - P1) equals the mode count")
{
    const auto model = EtaDensity::explicit_spectrum({-2.0, -0.5, 0.3, 1.0, 4.0});
    const int n = 5;
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 64; ++trial) {
        CMatrix<double> p1 = CMatrix<double>::Zero(n, n), p2 = CMatrix<double>::Zero(n, n);
        int both_off = 0, both_on = 0;
        for (int i = 0; i < n; ++i) {
            const bool a = rng() >> 63, b = rng() >> 63;
            p1(i, i) = a;
            p2(i, i) = b;
            both_off += !a && !b;
            both_on += a && b;
        }
        const auto c = index_pasting_check(p1, p2, model);
        // kernel: modes with neither condition; cokernel: modes with both
        CHECK(c.kernel == both_off);
        CHECK(c.cokernel == both_on);
        CHECK(c.lhs == c.rhs);
        CHECK(c.rhs == both_off - both_on);
    }
    CMatrix<double> bad = CMatrix<double>::Identity(n, n);
    bad(0, 1) = 0.5;
    CHECK_THROWS_AS(index_pasting_check(bad, bad, model), HeatError);
}

TEST_CASE("kernel CSV")
{
    std::ostringstream os;
    write_kernel_csv(os, {1.0, KernelVariant::forward}, {0.1, 1.0}, {0.0, 0.5, 1.0}, {0.2});
    const std::string s = os.str();
    CHECK(s.rfind("t,u,v,value\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 2 * 3);
}
