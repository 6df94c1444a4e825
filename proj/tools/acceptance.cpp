// Acceptance run: one PASS/FAIL line per criterion.
#include "spectral/aps_heat.hpp"
#include "spectral/char_forms.hpp"
#include "spectral/eta_zeta.hpp"
#include "spectral/operator_core.hpp"
#include "spectral/pasting_lab.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace spectral;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool report(int id, const std::string& title, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %d. %s (%.3f s) %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
    return o.pass;
}

std::string num(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

bool verdict_pass(const ExperimentReport& r, std::string& detail)
{
    detail += r.experiment + "=" + to_string(r.verdict) + " ";
    for (const auto* k : r.failing()) detail += "[" + k->quantity + " gap " + num(k->gap) + "] ";
    return r.verdict == Verdict::pass;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::string config = argc > 1 ? argv[1] : std::string(SPECTRAL_SOURCE_DIR) + "/models/default.toml";
    bool all = true;

    all &= report(1, "Vekua table at N = 32", [&] {
        auto cfg = load_config(config);
        cfg.sweeps.vekua_p = {1, 2, 3, 0, -1, -2};
        cfg.sweeps.vekua_N = 32;
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = exp_vekua(cfg);
        const double dt = seconds_since(t0);
        Outcome o;
        o.pass = verdict_pass(r, o.detail) && dt < 5.0;
        o.detail += "runtime " + num(dt) + " s";
        return o;
    });

    all &= report(2, "A-hat coefficients and ch_2", [] {
        const auto a = ahat_series(12);
        auto c = [&](const std::string& m) { return a.coefficient(parse_monomial(m)); };
        const bool ahat = c("p1") == Rational(-1, 24) && c("p1^2") == Rational(7, 5760) &&
                          c("p2") == Rational(-4, 5760) && c("p1^3") == Rational(-31, 967680) &&
                          c("p1 p2") == Rational(44, 967680) && c("p3") == Rational(-16, 967680);
        const auto ch2 = chern_character(2, 4).component(4);
        GradedSeries expect = GradedSeries::constant(0, 4);
        expect.degrees = ch2.degrees;
        expect.add_term(parse_monomial("c1^2"), Rational(1, 2));
        expect.add_term(parse_monomial("c2"), -1);
        return Outcome{ahat && ch2 == expect, "ch_2 = " + ch2.to_string()};
    });

    all &= report(3, "circle eta = -2a mod Z, erfc vs Hurwitz", [] {
        Outcome o;
        double worst_mod = 0, worst_cross = 0, worst_time = 0;
        for (int j = 1; j <= 9; ++j) {
            const double a = 0.1 * j;
            const auto t0 = std::chrono::steady_clock::now();
            const auto spec = SpectrumFamily::arithmetic(a);
            const auto e = eta_invariant(spec, {EtaMethod::erfc_extrapolation});
            const auto h = eta_invariant(spec, {EtaMethod::hurwitz_oracle});
            worst_time = std::max(worst_time, seconds_since(t0));
            worst_mod = std::max(worst_mod, std::abs(centered_mod_one(e.eta0 + 2 * a)));
            worst_cross = std::max(worst_cross, std::abs(e.eta0 - h.eta0));
        }
        o.pass = worst_mod <= 1e-6 && worst_cross <= 1e-6 && worst_time < 10;
        o.detail = "max |eta + 2a mod Z| " + num(worst_mod) + ", max |erfc - hurwitz| " + num(worst_cross) +
                   ", slowest a " + num(worst_time) + " s";
        return o;
    });

    all &= report(4, "finite zeta determinant and partition function", [] {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> mag(0.2, 3.0);
        double worst = 0;
        for (int n : {1, 2, 5, 13, 50}) {
            std::vector<double> v;
            std::complex<double> plain = 1;
            for (int k = 0; k < n; ++k) {
                const double x = (rng() >> 63 ? 1.0 : -1.0) * mag(rng);
                v.push_back(x);
                plain *= x;
            }
            const auto z = zeta_determinant(SpectrumFamily::explicit_spectrum(v), false, Branch::plus_i_pi);
            worst = std::max(worst, std::abs(z.determinant() - plain) / std::abs(plain));
        }
        CMatrix<double> one(1, 1);
        one(0, 0) = 1;
        const auto zf = partition_function(HermitianOperator<double>(one));
        boost::math::quadrature::sinh_sinh<double> ss;
        const double quad = ss.integrate([](double x) { return std::exp(-x * x); });
        const double pf = std::abs(zf - std::complex<double>(quad));
        const double dt = seconds_since(t0);
        return Outcome{worst <= 1e-10 && pf <= 1e-10 && dt < 1,
                       "det rel err " + num(worst) + ", |Z - quad| " + num(pf)};
    });

    all &= report(5, "APS heat identities", [] {
        const auto t0 = std::chrono::steady_clock::now();
        double pde = 0, bc = 0;
        const double h = 1e-3;
        for (double lam : {-2.5, -1.0, 0.0, 1.0, 3.0})
            for (auto var : {KernelVariant::forward, KernelVariant::adjoint}) {
                const ModeHeatKernel k{lam, var};
                for (double t : {0.1, 0.5, 2.0})
                    for (double v : {0.2, 1.1}) {
                        auto K = [&](double tt, double uu) { return mode_heat_kernel(k, tt, uu, v); };
                        for (double u : {0.3, 0.9, 1.7}) {
                            const double kt = (-K(t + 2 * h, u) + 8 * K(t + h, u) - 8 * K(t - h, u) + K(t - 2 * h, u)) / (12 * h);
                            const double kuu = (-K(t, u + 2 * h) + 16 * K(t, u + h) - 30 * K(t, u) + 16 * K(t, u - h) -
                                                K(t, u - 2 * h)) /
                                               (12 * h * h);
                            pde = std::max(pde, std::abs(kt - kuu + lam * lam * K(t, u)));
                        }
                        double r = 0;
                        if (k.dirichlet()) r = K(t, 0);
                        else {
                            const double ku = (-25 * K(t, 0) + 48 * K(t, h) - 36 * K(t, 2 * h) + 16 * K(t, 3 * h) -
                                               3 * K(t, 4 * h)) /
                                              (12 * h);
                            r = ku + k.robin_coefficient() * K(t, 0);
                        }
                        bc = std::max(bc, std::abs(r));
                    }
            }
        const auto model = EtaDensity::explicit_spectrum({1.0, -0.5, 2.0, 3.0}, {1, 2, 1, 1});
        double trace = 0;
        for (double t : {1e-3, 0.1, 1.0, 5.0})
            trace = std::max(trace, std::abs(eta_trace(model, t) - eta_density_integral(model, t)));
        double mellin = 0;
        for (double s : {0.3, 0.7, 1.0, 1.5}) mellin = std::max(mellin, mellin_eta_identity_check(model, s).gap);
        const double dt = seconds_since(t0);
        return Outcome{pde <= 1e-6 && bc <= 1e-6 && trace <= 1e-8 && mellin <= 1e-8 && dt < 30,
                       "pde " + num(pde) + ", bc " + num(bc) + ", trace " + num(trace) + ", mellin " + num(mellin)};
    });

    all &= report(6, "SF = Maslov with the Hoermander correction", [&] {
        const auto cfg = load_config(config);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = exp_sf_equals_maslov(cfg);
        const double dt = seconds_since(t0);
        Outcome o;
        bool hormander = false;
        for (const auto& c : r.cases) hormander |= c.name.rfind("hormander", 0) == 0;
        o.pass = verdict_pass(r, o.detail) && r.cases.size() >= 6 && hormander && dt < 10;
        o.detail += std::to_string(r.cases.size()) + " cases";
        return o;
    });

    all &= report(7, "pasting: eta additivity, lowest eigenvalue, dichotomy", [&] {
        const auto cfg = load_config(config);
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        bool ok = verdict_pass(exp_eta_additivity(cfg), o.detail);
        ok &= verdict_pass(exp_lowest_eigenvalue(cfg), o.detail);
        ok &= verdict_pass(exp_dichotomy(cfg), o.detail);
        const double dt = seconds_since(t0);
        o.pass = ok && dt < 300;
        return o;
    });

    all &= report(8, "Fuglede pair gap and Riesz distances", [] {
        double gap = 0, rz = 0;
        for (int n = 1; n <= 10; ++n) {
            const auto [m, t] = fuglede_pair<double>(n, 12);
            gap = std::max(gap, std::abs(gap_distance(m, t) - 2.0 * n / (n * n + 1.0)));
            rz = std::max(rz, std::abs(operator_norm<double>(riesz(t).matrix() - riesz(m).matrix()) -
                                       2.0 * n / std::sqrt(1.0 + n * n)));
        }
        return Outcome{gap <= 1e-12 && rz <= 1e-12, "gap err " + num(gap) + ", riesz err " + num(rz)};
    });

    std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return all ? 0 : 1;
}
