#include "spectral/eta_zeta.hpp"

#include "spectral/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace spectral {

namespace {

constexpr double pi = std::numbers::pi;

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

long arithmetic_cutoff_erfc(double t) { return long(std::ceil(6.6 / std::sqrt(t))) + 2; }
long arithmetic_cutoff_exp(double t) { return long(std::ceil(std::sqrt(43.0 / t))) + 2; }

std::complex<double> abs_power(double x, std::complex<double> s) { return std::exp(-s * std::log(std::abs(x))); }

}  // namespace

std::string to_string(EtaMethod m)
{
    switch (m) {
        case EtaMethod::automatic: return "automatic";
        case EtaMethod::hurwitz_oracle: return "hurwitz_oracle";
        case EtaMethod::erfc_extrapolation: return "erfc_extrapolation";
        case EtaMethod::finite_signed_count: return "finite_signed_count";
        case EtaMethod::reference_subtraction: return "reference_subtraction";
    }
    return "unknown";
}

double fractional_part(double x)
{
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;
    return f;
}

double centered_mod_one(double x)
{
    double f = fractional_part(x + 0.5) - 0.5;
    return f;
}

PartialSum eta_partial_sum(const SpectrumFamily& spec, std::complex<double> s, long cutoff, bool continuation)
{
    PartialSum r;
    if (spec.symmetric) return r;
    switch (spec.kind) {
        case SpectrumKind::explicit_list: {
            for (size_t i = 0; i < spec.values.size(); ++i) {
                if (spec.values[i] == 0.0) continue;
                r.value += double(spec.multiplicities[i]) * sgn(spec.values[i]) * abs_power(spec.values[i], s);
                r.terms += spec.multiplicities[i];
            }
            return r;
        }
        case SpectrumKind::arithmetic: {
            const double a = spec.a;
            if (continuation) {
                r.value = hurwitz_zeta(s, a) - hurwitz_zeta(s, 1.0 - a);
                return r;
            }
            if (!(s.real() > 1.0)) throw EtaError("eta_partial_sum: Re(s) must exceed 1 for the raw sum");
            if (cutoff < 1) throw EtaError("eta_partial_sum: cutoff must be positive");
            for (long k = cutoff; k >= 1; --k) r.value += abs_power(k + a, s) - abs_power(k - a, s);
            r.value += abs_power(a, s);
            r.terms = 2 * cutoff + 1;
            const double sig = s.real();
            r.tail_bound = (std::pow(cutoff + a, 1 - sig) + std::pow(cutoff - a, 1 - sig)) / (sig - 1);
            return r;
        }
        case SpectrumKind::secular: {
            if (!(s.real() > 1.0)) throw EtaError("eta_partial_sum: Re(s) must exceed 1 for the raw sum");
            for (size_t i = 0; i < spec.values.size(); ++i) {
                if (spec.values[i] == 0.0) continue;
                r.value += double(spec.multiplicities[i]) * sgn(spec.values[i]) * abs_power(spec.values[i], s);
                r.terms += spec.multiplicities[i];
            }
            // Lattice tail (n pi + phase)/L beyond the computed labels on both sides.
            const double sig = s.real();
            for (const auto& md : spec.mode_data) {
                const double c = std::pow(md.length / pi, sig) * md.multiplicity;
                const double up = double(md.label_max + 1) + md.phase / pi;
                const double dn = -double(md.label_min - 1) - md.phase / pi;
                if (up > 0) r.tail_bound += c * hurwitz_zeta(sig, up);
                if (dn > 0) r.tail_bound += c * hurwitz_zeta(sig, dn);
            }
            return r;
        }
    }
    return r;
}

double erfc_signed_sum(const SpectrumFamily& spec, double t, long cutoff)
{
    const double st = std::sqrt(t);
    if (spec.kind == SpectrumKind::arithmetic) {
        const double a = spec.a;
        double g = 0;
        for (long k = cutoff; k >= 1; --k) g += std::erfc((k + a) * st) - std::erfc((k - a) * st);
        return g + std::erfc(a * st);
    }
    double g = 0;
    for (size_t i = 0; i < spec.values.size(); ++i)
        g += spec.multiplicities[i] * sgn(spec.values[i]) * std::erfc(std::abs(spec.values[i]) * st);
    return g;
}

namespace {

EtaResult finalize(EtaResult r)
{
    r.mod_z_class = fractional_part(r.eta0);
    return r;
}

EtaResult eta_reference_subtraction(const SpectrumFamily& spec)
{
    EtaResult r;
    r.method = EtaMethod::reference_subtraction;
    for (const auto& md : spec.mode_data) {
        const double y = md.phase / pi;  // reference lattice n + y
        const double fy = fractional_part(y);
        const bool lattice_hits_zero = std::abs(fy) < 1e-12 || std::abs(fy - 1) < 1e-12;
        double e = lattice_hits_zero ? 0.0 : 1.0 - 2.0 * fy;
        const double x0 = md.zero_label, y0 = -y;
        const double need_lo = std::floor(std::min(x0, y0)) - 1, need_hi = std::ceil(std::max(x0, y0)) + 1;
        if (double(md.label_min) > need_lo || double(md.label_max) < need_hi) {
            std::ostringstream os;
            os << "eta: labels [" << md.label_min << ", " << md.label_max << "] of mode " << md.mode
               << " do not cover [" << need_lo << ", " << need_hi << "]";
            throw EtaError(os.str());
        }
        for (size_t i = 0; i < spec.values.size(); ++i) {
            if (spec.modes[i] != md.mode) continue;
            const double ref = double(spec.labels[i]) + y;
            const double sref = std::abs(ref) < 1e-12 ? 0.0 : sgn(ref);
            e += sgn(spec.values[i]) - sref;
        }
        if (md.zero_mode) r.zero_modes += md.multiplicity;
        r.eta0 += md.multiplicity * e;
    }
    r.error_estimate = 1e-14 * std::max(1.0, std::abs(r.eta0));
    return finalize(r);
}

EtaResult eta_erfc(const SpectrumFamily& spec, const EtaOptions& opt)
{
    if (spec.kind == SpectrumKind::secular)
        throw EtaError("eta: erfc extrapolation needs the full spectrum; secular families are truncated");
    if (opt.levels < 2) throw EtaError("eta: at least two t levels are needed");
    EtaResult r;
    r.method = EtaMethod::erfc_extrapolation;
    for (int j = 0; j < opt.levels; ++j) {
        const double t = opt.t0 * std::pow(4.0, -j);
        r.t_grid.push_back(t);
        r.g_values.push_back(erfc_signed_sum(spec, t, arithmetic_cutoff_erfc(t)));
    }
    // Richardson in h = sqrt(t); h halves from level to level.
    const int n = opt.levels;
    std::vector<std::vector<double>> tab(size_t(n), std::vector<double>(size_t(n), 0.0));
    for (int j = 0; j < n; ++j) {
        tab[size_t(j)][0] = r.g_values[size_t(j)];
        for (int m = 1; m <= j; ++m) {
            const double f = std::pow(2.0, m);
            tab[size_t(j)][size_t(m)] = (f * tab[size_t(j)][size_t(m - 1)] - tab[size_t(j - 1)][size_t(m - 1)]) / (f - 1);
        }
    }
    const auto& last = tab[size_t(n - 1)];
    for (int m = 1; m < n; ++m) r.increments.push_back(last[size_t(m)] - last[size_t(m - 1)]);
    r.eta0 = last[size_t(n - 1)];
    const double inc = std::abs(last[size_t(n - 1)] - last[size_t(n - 2)]);
    const double roundoff = 64 * std::numeric_limits<double>::epsilon() * double(arithmetic_cutoff_erfc(r.t_grid.back()));
    r.error_estimate = std::max(10 * inc, roundoff);
    if (spec.kind == SpectrumKind::explicit_list) r.zero_modes = spec.zero_count();
    if (!(r.error_estimate <= opt.error_budget)) {
        std::ostringstream os;
        os << "eta: erfc extrapolation did not converge, estimate " << r.eta0 << " error " << r.error_estimate
           << " budget " << opt.error_budget << "; g(t) =";
        for (double g : r.g_values) os << ' ' << g;
        throw EtaError(os.str());
    }
    return finalize(r);
}

}  // namespace

EtaResult eta_invariant(const SpectrumFamily& spec, const EtaOptions& opt)
{
    EtaMethod m = opt.method;
    if (m == EtaMethod::automatic) {
        switch (spec.kind) {
            case SpectrumKind::explicit_list: m = EtaMethod::finite_signed_count; break;
            case SpectrumKind::arithmetic: m = EtaMethod::hurwitz_oracle; break;
            case SpectrumKind::secular: m = EtaMethod::reference_subtraction; break;
        }
    }
    if (spec.symmetric && m != EtaMethod::erfc_extrapolation) {
        EtaResult r;
        r.method = m;
        if (spec.kind != SpectrumKind::arithmetic) r.zero_modes = spec.zero_count();
        return finalize(r);
    }
    switch (m) {
        case EtaMethod::hurwitz_oracle: {
            if (spec.kind != SpectrumKind::arithmetic) throw EtaError("eta: Hurwitz oracle needs an arithmetic family");
            EtaResult r;
            r.method = m;
            r.eta0 = hurwitz_zeta(0.0, spec.a) - hurwitz_zeta(0.0, 1.0 - spec.a);
            r.error_estimate = 1e-14;
            return finalize(r);
        }
        case EtaMethod::finite_signed_count: {
            if (spec.kind != SpectrumKind::explicit_list) throw EtaError("eta: signed count needs an explicit spectrum");
            EtaResult r;
            r.method = m;
            for (size_t i = 0; i < spec.values.size(); ++i) r.eta0 += spec.multiplicities[i] * sgn(spec.values[i]);
            r.zero_modes = spec.zero_count();
            return finalize(r);
        }
        case EtaMethod::reference_subtraction:
            if (spec.kind != SpectrumKind::secular) throw EtaError("eta: reference subtraction needs a secular family");
            return eta_reference_subtraction(spec);
        case EtaMethod::erfc_extrapolation:
            return eta_erfc(spec, opt);
        case EtaMethod::automatic:
            break;
    }
    throw EtaError("eta: no method");
}

ZetaResult zeta0(const SpectrumFamily& spec, bool squared, bool subtract_kernel)
{
    (void)squared;  // zeta_{|D|}(0) and zeta_{D^2}(0) coincide
    ZetaResult r;
    switch (spec.kind) {
        case SpectrumKind::explicit_list: {
            const int z = spec.zero_count();
            if (z > 0 && !subtract_kernel) throw ZetaError("zeta0: zero modes present without kernel subtraction");
            r.zeta0 = double(spec.total_multiplicity() - z);
            r.method = "eigenvalue_count";
            return r;
        }
        case SpectrumKind::arithmetic:
            r.zeta0 = hurwitz_zeta(0.0, spec.a) + hurwitz_zeta(0.0, 1.0 - spec.a);
            r.error_estimate = 1e-14;
            r.method = "hurwitz_oracle";
            return r;
        case SpectrumKind::secular:
            break;
    }
    throw ZetaError("zeta0: secular families are truncated; no continuation available");
}

double heat_trace(const SpectrumFamily& spec, double t)
{
    if (spec.kind == SpectrumKind::arithmetic) {
        const long K = arithmetic_cutoff_exp(t);
        double s = 0;
        for (long k = K; k >= 1; --k) s += std::exp(-t * (k + spec.a) * (k + spec.a)) + std::exp(-t * (k - spec.a) * (k - spec.a));
        return s + std::exp(-t * spec.a * spec.a);
    }
    double s = 0;
    for (size_t i = 0; i < spec.values.size(); ++i)
        s += spec.multiplicities[i] * std::exp(-t * spec.values[i] * spec.values[i]);
    return s;
}

ZetaResult mellin_zeta_continuation(const SpectrumFamily& spec)
{
    if (spec.kind == SpectrumKind::secular) throw ZetaError("mellin continuation: secular families are truncated");
    if (spec.kind == SpectrumKind::explicit_list && spec.zero_count() > 0)
        throw ZetaError("mellin continuation: zero modes present");
    // Fit sqrt(t) Theta(t) = sum_i c_i t^{i/2} near t = 0.
    const double tc = 0.01;
    const int levels = 8, degree = 5;
    Eigen::MatrixXd a(levels, degree + 1);
    Eigen::VectorXd b(levels);
    for (int j = 0; j < levels; ++j) {
        const double t = tc * std::pow(2.0, -j);
        const double h = std::sqrt(t);
        for (int i = 0; i <= degree; ++i) a(j, i) = std::pow(h, i);
        b(j) = h * heat_trace(spec, t);
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    const double cm1 = c(0), c0 = c(1);
    auto remainder = [&](double t) { return heat_trace(spec, t) - cm1 / std::sqrt(t) - c0; };
    using boost::math::quadrature::gauss_kronrod;
    double err1 = 0, err2 = 0;
    double i1 = gauss_kronrod<double, 61>::integrate([&](double t) { return remainder(t) / t; }, tc, 1.0, 12, 1e-13, &err1);
    // Below tc the fitted terms i >= 2 stand in for the remainder.
    for (int i = 2; i <= degree; ++i) i1 += c(i) * std::pow(tc, 0.5 * (i - 1)) / (0.5 * (i - 1));
    const double iinf = gauss_kronrod<double, 61>::integrate([&](double t) { return heat_trace(spec, t) / t; }, 1.0,
                                                             std::numeric_limits<double>::infinity(), 15, 1e-13, &err2);
    ZetaResult r;
    r.zeta0 = c0;
    r.zeta_prime0 = std::numbers::egamma * c0 + i1 - 2 * cm1 + iinf;
    r.log_det_modulus = -r.zeta_prime0;
    r.error_estimate = err1 + err2;
    r.method = "mellin_subtraction";
    return r;
}

ZetaResult zeta_determinant(const SpectrumFamily& spec, bool squared, Branch branch)
{
    const double bs = branch == Branch::plus_i_pi ? 1.0 : -1.0;
    ZetaResult r;
    double zeta_abs = 0, eta = 0;
    switch (spec.kind) {
        case SpectrumKind::explicit_list: {
            if (spec.zero_count() > 0) throw ZetaError("zeta_determinant: zero modes");
            double logdet = 0;
            for (size_t i = 0; i < spec.values.size(); ++i) {
                logdet += spec.multiplicities[i] * std::log(std::abs(spec.values[i]));
                eta += spec.multiplicities[i] * sgn(spec.values[i]);
            }
            zeta_abs = double(spec.total_multiplicity());
            r.log_det_modulus = squared ? 2 * logdet : logdet;
            r.method = "finite_product";
            break;
        }
        case SpectrumKind::arithmetic: {
            const double a = spec.a;
            const double d = hurwitz_zeta_derivative_at_zero(a) + hurwitz_zeta_derivative_at_zero(1.0 - a);
            r.log_det_modulus = squared ? -2 * d : -d;
            zeta_abs = hurwitz_zeta(0.0, a) + hurwitz_zeta(0.0, 1.0 - a);
            eta = hurwitz_zeta(0.0, a) - hurwitz_zeta(0.0, 1.0 - a);
            r.method = "lerch";
            r.error_estimate = 1e-14;
            break;
        }
        case SpectrumKind::secular:
            throw ZetaError("zeta_determinant: secular families are truncated");
    }
    r.zeta0 = zeta_abs;
    r.zeta_prime0 = -r.log_det_modulus;
    r.phase = squared ? 0.0 : -bs * 0.5 * pi * (zeta_abs - eta);
    return r;
}

std::complex<double> partition_function(const HermitianOperator<double>& t)
{
    Eigen::SelfAdjointEigenSolver<CMatrix<double>> es(t.matrix(), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    double logdet = 0, eta = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) <= 1e-12 * scale) throw ZetaError("partition_function: singular operator");
        logdet += std::log(std::abs(ev(i)));
        eta += sgn(ev(i));
    }
    const double zeta = double(ev.size());
    const double modulus = std::exp(0.5 * zeta * std::log(pi) - 0.5 * logdet);
    return std::polar(modulus, -0.25 * pi * (eta - zeta));
}

double signed_heat_trace(const SpectrumFamily& spec, double t)
{
    if (spec.kind == SpectrumKind::arithmetic) {
        const double a = spec.a;
        const long K = arithmetic_cutoff_exp(t);
        double s = 0;
        for (long k = K; k >= 1; --k)
            s += (k + a) * std::exp(-t * (k + a) * (k + a)) - (k - a) * std::exp(-t * (k - a) * (k - a));
        return s + a * std::exp(-t * a * a);
    }
    double s = 0;
    for (size_t i = 0; i < spec.values.size(); ++i)
        s += spec.multiplicities[i] * spec.values[i] * std::exp(-t * spec.values[i] * spec.values[i]);
    return s;
}

TraceBound small_t_trace_bound(const SpectrumFamily& spec, int samples)
{
    TraceBound b;
    for (int i = 0; i < samples; ++i) {
        const double t = std::pow(10.0, -4.0 + 4.0 * i / double(samples - 1));
        const double v = spec.symmetric ? 0.0 : std::abs(signed_heat_trace(spec, t)) / std::sqrt(t);
        b.t_grid.push_back(t);
        b.values.push_back(v);
        if (v >= b.supremum) {
            b.supremum = v;
            b.argmax_t = t;
        }
    }
    return b;
}

}  // namespace spectral
