#include "spectral/aps_heat.hpp"

#include "spectral/eta_zeta.hpp"
#include "spectral/special.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace spectral {

namespace {

constexpr double pi = std::numbers::pi;

double sign_plus(double x) { return x < 0 ? -1.0 : 1.0; }

// e^{-lambda^2 t} e^{-d^2/4t} / (2 sqrt(pi t))
double damped_gaussian(double lambda, double t, double d)
{
    return std::exp(-lambda * lambda * t - d * d / (4 * t)) / (2 * std::sqrt(pi * t));
}

// rank of the conditions on c e^{-nu x} at x = 0 (active0) and x = len (active1)
int condition_rank(bool active0, bool active1, double nu, double len)
{
    const double shift = std::max(0.0, -nu * len);
    CMatrix<double> rows(2, 1);
    rows(0, 0) = active0 ? std::exp(-shift) : 0.0;
    rows(1, 0) = active1 ? std::exp(-nu * len - shift) : 0.0;
    return finite_index<double>({rows, 1e-12}).rank;
}

// kernel and cokernel of d/dx + nu on [0, len] with c0 f(0) = 0, c1 f(len) = 0 (c in {0, 1});
// the adjoint problem is -d/dx + nu with the complementary conditions.
std::pair<int, int> mode_solvability(double nu, double len, bool c0, bool c1)
{
    const int ker = 1 - condition_rank(c0, c1, nu, len);
    const int coker = 1 - condition_rank(!c0, !c1, -nu, len);
    return {ker, coker};
}

}  // namespace

bool ModeHeatKernel::dirichlet() const
{
    return variant == KernelVariant::forward ? lambda >= 0 : lambda < 0;
}

double ModeHeatKernel::robin_coefficient() const
{
    if (dirichlet()) return 0.0;
    return variant == KernelVariant::forward ? lambda : -lambda;
}

double mode_heat_kernel(const ModeHeatKernel& k, double t, double u, double v)
{
    const double direct = damped_gaussian(k.lambda, t, u - v);
    const double image = damped_gaussian(k.lambda, t, u + v);
    if (k.dirichlet()) return direct - image;
    // f' + c f = 0 with c = -kappa <= 0:
    // -kappa e^{kappa (u+v)} erfc((u+v)/(2 sqrt t) + kappa sqrt t), written through erfcx
    const double kappa = -k.robin_coefficient();
    const double x = (u + v) / (2 * std::sqrt(t));
    const double y = x + kappa * std::sqrt(t);
    const double tail = kappa == 0 ? 0.0 : -kappa * std::exp(-x * x - kappa * kappa * t) * erfcx(y);
    return direct + image + tail;
}

void write_kernel_csv(std::ostream& os, const ModeHeatKernel& k, const std::vector<double>& ts,
                      const std::vector<double>& us, const std::vector<double>& vs)
{
    os << "t,u,v,value\n";
    os.precision(17);
    for (double t : ts)
        for (double u : us)
            for (double v : vs) os << t << ',' << u << ',' << v << ',' << mode_heat_kernel(k, t, u, v) << '\n';
}

EtaDensity EtaDensity::from_tangential(const TangentialModel& t)
{
    t.validate();
    EtaDensity d;
    for (int k = 0; k < t.modes(); ++k) {
        d.spectrum.push_back(t.lambdas[size_t(k)]);
        d.spectrum.push_back(-t.lambdas[size_t(k)]);
        d.multiplicities.push_back(t.multiplicity(k));
        d.multiplicities.push_back(t.multiplicity(k));
    }
    return d;
}

EtaDensity EtaDensity::explicit_spectrum(std::vector<double> values, std::vector<int> multiplicities)
{
    EtaDensity d{std::move(values), std::move(multiplicities), 0};
    d.validate();
    return d;
}

void EtaDensity::validate() const
{
    if (!multiplicities.empty() && multiplicities.size() != spectrum.size())
        throw HeatError("EtaDensity: multiplicities do not match the spectrum");
    for (size_t i = 0; i < spectrum.size(); ++i) {
        if (!std::isfinite(spectrum[i]) || spectrum[i] == 0)
            throw HeatError("EtaDensity: eigenvalues must be finite and nonzero (kernel goes in m0)");
        if (multiplicity(i) < 1) throw HeatError("EtaDensity: multiplicities must be positive");
    }
    if (m0 < 0) throw HeatError("EtaDensity: m0 must be nonnegative");
}

double eta_density(const EtaDensity& model, double t, double u)
{
    const double st = std::sqrt(t);
    const double gauss = 1.0 / std::sqrt(pi * t);
    double sum = 0;
    auto term = [&](double lambda) {
        const double a = std::abs(lambda);
        const double y = u / st + a * st;
        return sign_plus(lambda) * std::exp(-u * u / t - a * a * t) * (a * erfcx(y) - gauss);
    };
    for (size_t i = 0; i < model.spectrum.size(); ++i) sum += model.multiplicity(i) * term(model.spectrum[i]);
    sum += model.m0 * term(0.0);
    return sum;
}

double eta_trace(const EtaDensity& model, double t)
{
    double sum = -0.5 * model.m0;
    for (size_t i = 0; i < model.spectrum.size(); ++i)
        sum -= model.multiplicity(i) * sign_plus(model.spectrum[i]) * 0.5 * std::erfc(std::abs(model.spectrum[i]) * std::sqrt(t));
    return sum;
}

double eta_density_integral(const EtaDensity& model, double t, double upper)
{
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double u) { return eta_density(model, t, u); };
    // split where the Gaussian layer ends so the adaptive rule sees both scales
    const double layer = std::min(upper, 8 * std::sqrt(t));
    double err = 0;
    double total = gauss_kronrod<double, 61>::integrate(f, 0.0, layer, 15, 1e-13, &err);
    if (layer < upper) total += gauss_kronrod<double, 61>::integrate(f, layer, upper, 15, 1e-13, &err);
    return total;
}

MellinCheck mellin_eta_identity_check(const EtaDensity& model, double s)
{
    model.validate();
    if (!(s > 0 && s < 2)) throw HeatError("mellin_eta_identity_check: need 0 < s < 2");
    MellinCheck out;
    out.s = s;
    for (size_t i = 0; i < model.spectrum.size(); ++i)
        out.a0 -= 0.5 * model.multiplicity(i) * sign_plus(model.spectrum[i]);

    auto subtracted = [&](double t) {
        double v = 0;
        for (size_t i = 0; i < model.spectrum.size(); ++i)
            v += 0.5 * model.multiplicity(i) * sign_plus(model.spectrum[i]) * std::erf(std::abs(model.spectrum[i]) * std::sqrt(t));
        return v * std::pow(t, s - 1);
    };
    auto tail = [&](double t) { return (eta_trace(model, t) + 0.5 * model.m0) * std::pow(t, s - 1); };

    double e1 = 0, e2 = 0, l1 = 0;
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    try {
        out.f1 = ts.integrate(subtracted, 0.0, 1.0, 1e-14, &e1, &l1) + out.a0 / s;
        out.f_inf = es.integrate([&](double t) { return tail(1.0 + t); }, 0.0, std::numeric_limits<double>::infinity(),
                                 1e-14, &e2, &l1);
    } catch (const std::exception& ex) {
        throw HeatError(std::string("mellin_eta_identity_check: quadrature failed: ") + ex.what());
    }
    out.lhs = out.f1 + out.f_inf;
    out.quadrature_error = e1 * std::max(1.0, std::abs(out.f1)) + e2 * std::max(1.0, std::abs(out.f_inf));

    const SpectrumFamily spec = SpectrumFamily::explicit_spectrum(model.spectrum, model.multiplicities);
    const double eta2s = eta_partial_sum(spec, {2 * s, 0.0}).value.real();
    out.rhs = -std::tgamma(s + 0.5) / (2 * s * std::sqrt(pi)) * eta2s;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

ProductIndex aps_index_product_model(const EtaDensity& b, double R)
{
    b.validate();
    if (b.m0 != 0) throw HeatError("aps_index_product_model: B must be invertible");
    if (!(R > 0)) throw HeatError("aps_index_product_model: R must be positive");
    ProductIndex out;

    std::vector<double> boundary;
    std::vector<int> mult;
    for (size_t i = 0; i < b.spectrum.size(); ++i) {
        boundary.push_back(b.spectrum[i]);   // u = 0, tangential B
        boundary.push_back(-b.spectrum[i]);  // u = R, tangential -B
        mult.push_back(b.multiplicity(i));
        mult.push_back(b.multiplicity(i));
    }
    EtaOptions opt;
    opt.method = EtaMethod::finite_signed_count;
    out.eta_boundary = eta_invariant(SpectrumFamily::explicit_spectrum(boundary, mult), opt).eta0;
    const double half = -0.5 * out.eta_boundary;
    out.index = int(std::lround(half));
    out.residual = std::abs(half - out.index);

    // d/du + nu on [0, R]: P_>=(B) kills nu >= 0 at u = 0, P_>=(-B) kills nu <= 0 at u = R
    for (size_t i = 0; i < b.spectrum.size(); ++i) {
        const double nu = b.spectrum[i];
        auto [ker, coker] = mode_solvability(nu, R, nu >= 0, nu <= 0);
        out.kernel += b.multiplicity(i) * ker;
        out.cokernel += b.multiplicity(i) * coker;
    }
    out.mode_count_index = out.kernel - out.cokernel;
    if (out.residual > 1e-6) throw HeatError("aps_index_product_model: -eta/2 is not an integer");
    if (out.mode_count_index != out.index) throw HeatError("aps_index_product_model: mode count disagrees with -eta/2");
    return out;
}

ProductIndex aps_index_product_model(const CylinderModel& model)
{
    model.validate();
    if (model.left.kind != EndCondition::aps_greater_equal || model.right.kind != EndCondition::aps_less)
        throw HeatError("aps_index_product_model: needs P_>= on both boundary components");
    if (!model.shifts.empty()) throw HeatError("aps_index_product_model: needs a product model");
    return aps_index_product_model(EtaDensity::from_tangential(model.tangential), model.R);
}

PastingCheck index_pasting_check(const CMatrix<double>& p1, const CMatrix<double>& p2, const EtaDensity& model)
{
    model.validate();
    const Eigen::Index n = Eigen::Index(model.spectrum.size());
    if (p1.rows() != n || p2.rows() != n || p1.cols() != n || p2.cols() != n)
        throw HeatError("index_pasting_check: projection size does not match the mode space");
    auto diag = [&](const CMatrix<double>& p, const char* name) {
        std::vector<bool> d(static_cast<size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const double x = std::abs(p(i, j));
                if (i != j && x > 1e-12) throw HeatError(std::string("index_pasting_check: ") + name + " is not diagonal");
            }
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::complex<double> x = p(i, i);
            if (std::abs(x - 1.0) < 1e-12) d[size_t(i)] = true;
            else if (std::abs(x) < 1e-12) d[size_t(i)] = false;
            else throw HeatError(std::string("index_pasting_check: ") + name + " is not a projection");
        }
        return d;
    };
    const auto d1 = diag(p1, "P1");
    const auto d2 = diag(p2, "P2");

    PastingCheck out;
    const CMatrix<double> id = CMatrix<double>::Identity(n, n);
    out.lhs = virtual_codimension<double>(p2, id - p1);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto [ker, coker] = mode_solvability(model.spectrum[size_t(i)], 1.0, d1[size_t(i)], d2[size_t(i)]);
        out.kernel += model.multiplicity(size_t(i)) * ker;
        out.cokernel += model.multiplicity(size_t(i)) * coker;
    }
    out.rhs = out.kernel - out.cokernel;
    return out;
}

double mehler_kernel(double a, double x, double y, double t)
{
    if (!(t > 0) || a < 0) throw HeatError("mehler_kernel: need t > 0 and a >= 0");
    const double z = 2 * a * t;
    double log_s, cosh_over_s, inv_s;  // s = sinh(2at)/(2a)
    if (z < 1e-4) {
        const double z2 = z * z;
        const double shz = 1 + z2 / 6 + z2 * z2 / 120;    // sinh z / z
        const double chz = 1 + z2 / 2 + z2 * z2 / 24;     // cosh z
        log_s = std::log(t) + std::log(shz);
        inv_s = 1.0 / (t * shz);
        cosh_over_s = chz * inv_s;
    } else {
        log_s = z + std::log1p(-std::exp(-2 * z)) - std::log(4 * a);
        inv_s = 4 * a * std::exp(-z) / (-std::expm1(-2 * z));
        cosh_over_s = 2 * a / std::tanh(z);
    }
    const double exponent = -0.25 * (cosh_over_s * (x * x + y * y) - 2 * x * y * inv_s);
    return std::exp(exponent - 0.5 * (std::log(4 * pi) + log_s));
}

}  // namespace spectral
