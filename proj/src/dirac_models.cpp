#include "spectral/dirac_models.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace spectral {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

void TangentialModel::validate() const
{
    if (lambdas.empty()) throw std::invalid_argument("tangential model: no eigenvalues");
    if (!multiplicities.empty() && multiplicities.size() != lambdas.size())
        throw std::invalid_argument("tangential model: multiplicities must match lambdas");
    for (size_t k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] > 0)) throw std::invalid_argument("tangential model: B must be invertible, lambda_k > 0");
        if (k > 0 && lambdas[k] < lambdas[k - 1])
            throw std::invalid_argument("tangential model: lambdas must be ascending");
        if (multiplicity(int(k)) < 1) throw std::invalid_argument("tangential model: multiplicity must be positive");
    }
}

int TangentialModel::fiber_dim() const
{
    int d = 0;
    for (int k = 0; k < modes(); ++k) d += 2 * multiplicity(k);
    return d;
}

double TangentialModel::lambda_min() const { return lambdas.front(); }
double TangentialModel::lambda_max() const { return lambdas.back(); }

RealizedTangential realize(const TangentialModel& model)
{
    model.validate();
    const int d = model.fiber_dim();
    RealizedTangential r{CMatrix<double>::Zero(d, d), CMatrix<double>::Zero(d, d)};
    int o = 0;
    for (int k = 0; k < model.modes(); ++k)
        for (int c = 0; c < model.multiplicity(k); ++c, o += 2) {
            r.B(o, o) = model.lambdas[size_t(k)];
            r.B(o + 1, o + 1) = -model.lambdas[size_t(k)];
            r.sigma(o, o + 1) = -1.0;
            r.sigma(o + 1, o) = 1.0;
        }
    return r;
}

double TangentialIdentities::max() const { return std::max({sigma_square, sigma_skew, anticommutator, b_symmetry}); }

TangentialIdentities tangential_identity_residuals(const RealizedTangential& r)
{
    const auto id = CMatrix<double>::Identity(r.sigma.rows(), r.sigma.cols());
    TangentialIdentities t;
    t.sigma_square = (r.sigma * r.sigma + id).cwiseAbs().maxCoeff();
    t.sigma_skew = (r.sigma.adjoint() + r.sigma).cwiseAbs().maxCoeff();
    t.anticommutator = (r.sigma * r.B + r.B * r.sigma).cwiseAbs().maxCoeff();
    t.b_symmetry = (r.B.adjoint() - r.B).cwiseAbs().maxCoeff();
    return t;
}

double ModeLine::length() const
{
    double l = 0;
    for (const auto& s : segments) l += s.length;
    return l;
}

Eigen::Matrix2d segment_propagator(double mu, double lambda, double length)
{
    Eigen::Matrix2d a;
    a << -lambda, mu, -mu, lambda;
    const double d = lambda * lambda - mu * mu;
    double c, s;
    if (d > 0) {
        const double w = std::sqrt(d);
        c = std::cosh(w * length);
        s = std::sinh(w * length) / w;
    } else if (d < 0) {
        const double k = std::sqrt(-d);
        c = std::cos(k * length);
        s = std::sin(k * length) / k;
    } else {
        c = 1.0;
        s = length;
    }
    return c * Eigen::Matrix2d::Identity() + s * a;
}

Eigen::Vector2d propagate_direction(double mu, const Segment& seg, const Eigen::Vector2d& v, bool backward)
{
    const double lambda = seg.lambda, len = seg.length;
    const double sgn = backward ? -1.0 : 1.0;
    const double d = lambda * lambda - mu * mu;
    Eigen::Vector2d r;
    if (d > 0) {
        // exp(A l) = e^{wl} P+ + e^{-wl} P-, P+- = (I +- A/w)/2, entries formed without cancellation.
        const double w = std::sqrt(d);
        const double al = std::abs(lambda);
        const double big = w + al, small = -mu * mu / (w + al);  // w + |lambda|, w - |lambda|
        const double w_minus_l = lambda > 0 ? small : big;
        const double w_plus_l = lambda > 0 ? big : small;
        Eigen::Matrix2d pp, pm;
        pp << w_minus_l, mu, -mu, w_plus_l;
        pm << w_plus_l, -mu, mu, w_minus_l;
        pp /= 2 * w;
        pm /= 2 * w;
        const Eigen::Matrix2d& lead = backward ? pm : pp;
        const Eigen::Matrix2d& tail = backward ? pp : pm;
        const Eigen::Vector2d main = lead * v, sec = tail * v;
        r = main + std::exp(-2 * w * len) * sec;
        if (r.norm() == 0.0) r = sec;
    } else {
        Eigen::Matrix2d a;
        a << -lambda, mu, -mu, lambda;
        double c, s;
        if (d < 0) {
            const double k = std::sqrt(-d);
            c = std::cos(k * len);
            s = std::sin(k * len) / k;
        } else {
            c = 1.0;
            s = len;
        }
        r = (c * Eigen::Matrix2d::Identity() + sgn * s * a) * v;
    }
    const double n = r.norm();
    if (!(n > 0) || !std::isfinite(n)) throw std::runtime_error("propagate_direction: degenerate direction");
    return r / n;
}

namespace {

// Segments covering [0, x) and [x, L).
std::pair<std::vector<Segment>, std::vector<Segment>> split_at(const std::vector<Segment>& segs, double x)
{
    std::vector<Segment> left, right;
    double pos = 0;
    for (const auto& s : segs) {
        const double end = pos + s.length;
        if (end <= x) {
            left.push_back(s);
        } else if (pos >= x) {
            right.push_back(s);
        } else {
            left.push_back({x - pos, s.lambda});
            right.push_back({end - x, s.lambda});
        }
        pos = end;
    }
    return {left, right};
}

// Lift of theta across one constant segment.
double lift_segment(double theta, double mu, const Segment& seg)
{
    const double lambda = seg.lambda, len = seg.length;
    if (len <= 0) return theta;
    if (mu == 0 && lambda == 0) return theta;
    const double d = mu * mu - lambda * lambda;
    if (d > 0) {
        // For mu > 0, theta' = -(m - l sin 2theta) with m = |mu|, l = lambda; psi = -theta obeys the same
        // law for mu < 0. G(phi) = (1/k) atan((m tan(phi) - l)/k) + j pi/k is the lifted travel time.
        const double s = mu > 0 ? 1.0 : -1.0;
        const double m = std::abs(mu), l = lambda, k = std::sqrt(d);
        auto g = [&](double phi) {
            const double j = std::round(phi / pi);
            const double r = phi - j * pi;  // [-pi/2, pi/2]
            double base;
            if (std::abs(std::abs(r) - pi / 2) < 1e-15)
                base = std::copysign(pi / 2, r);
            else
                base = std::atan((m * std::tan(r) - l) / k);
            return (base + j * pi) / k;
        };
        auto g_inv = [&](double t) {
            const double kt = k * t;
            const double j = std::round(kt / pi);
            const double r = kt - j * pi;
            double base;
            if (std::abs(std::abs(r) - pi / 2) < 1e-15)
                base = std::copysign(pi / 2, r);
            else
                base = std::atan((k * std::tan(r) + l) / m);
            return base + j * pi;
        };
        // theta decreases for mu > 0: G(theta_new) = G(theta) - len; mirror for mu < 0.
        if (s > 0) return g_inv(g(theta) - len);
        return -g_inv(g(-theta) - len);
    }
    // Hyperbolic or threshold: theta stays between consecutive fixed points of sin 2theta = mu/lambda.
    const Eigen::Vector2d w = propagate_direction(mu, seg, Eigen::Vector2d(std::cos(theta), std::sin(theta)));
    const double phi = std::atan2(w(1), w(0));
    const double ta = 0.5 * std::asin(std::clamp(mu / lambda, -1.0, 1.0));
    const double tb = pi / 2 - ta;
    double lower = -std::numeric_limits<double>::infinity(), upper = std::numeric_limits<double>::infinity();
    for (double base : {ta, tb}) {
        const double kk = std::floor((theta - base) / pi);
        for (double j : {kk - 1, kk, kk + 1, kk + 2}) {
            const double fp = base + j * pi;
            if (std::abs(fp - theta) <= 1e-15 * std::max(1.0, std::abs(theta))) return theta;
            if (fp < theta) lower = std::max(lower, fp);
            if (fp > theta) upper = std::min(upper, fp);
        }
    }
    const double mid = 0.5 * (lower + upper);
    double rep = phi + pi * std::round((mid - phi) / pi);
    return std::clamp(rep, lower, upper);
}

}  // namespace

double secular_function(const ModeLine& line, double mu)
{
    const auto [left, right] = split_at(line.segments, 0.5 * line.length());
    Eigen::Vector2d wl(std::cos(line.alpha_left), std::sin(line.alpha_left));
    for (const auto& s : left) wl = propagate_direction(mu, s, wl);
    Eigen::Vector2d wr(std::cos(line.alpha_right), std::sin(line.alpha_right));
    for (auto it = right.rbegin(); it != right.rend(); ++it) wr = propagate_direction(mu, *it, wr, true);
    return wl(0) * wr(1) - wl(1) * wr(0);
}

double prufer_angle(const ModeLine& line, double mu)
{
    double theta = line.alpha_left;
    for (const auto& s : line.segments) theta = lift_segment(theta, mu, s);
    return theta;
}

// Both ends are lifted to the midpoint, each in its own stable direction. The flow map
// commutes with shifts by pi, so the label agrees with -(theta(L) - alpha_right)/pi.
double prufer_label(const ModeLine& line, double mu)
{
    const auto [left, right] = split_at(line.segments, 0.5 * line.length());
    double a = line.alpha_left;
    for (const auto& s : left) a = lift_segment(a, mu, s);
    double b = line.alpha_right;
    for (auto it = right.rbegin(); it != right.rend(); ++it) b = lift_segment(b, -mu, {it->length, -it->lambda});
    return -(a - b) / pi;
}

namespace {

struct Attempt {
    bool ok = false;
    std::string why;
};

Attempt scan_roots(const ModeLine& line, double lo, double hi, double h, bool zero_mode, ModeRoots& out)
{
    auto g = [&](double mu) {
        if (!zero_mode) return secular_function(line, mu);
        if (mu == 0.0) {
            const double d = 1e-8 * h;
            return (secular_function(line, d) - secular_function(line, -d)) / (2 * d);
        }
        return secular_function(line, mu) / mu;
    };
    long n = std::max<long>(2, long(std::ceil((hi - lo) / h)));
    if (n % 2 == 0) ++n;
    std::vector<double> x(size_t(n) + 1), y(size_t(n) + 1), lab(size_t(n) + 1);
    for (long i = 0; i <= n; ++i) {
        double xi = (i == n) ? hi : lo + (hi - lo) * double(i) / double(n);
        double yi = g(xi);
        if (yi == 0.0 && i > 0 && i < n) {
            xi += 1e-3 * (hi - lo) / double(n);
            yi = g(xi);
        }
        x[size_t(i)] = xi;
        y[size_t(i)] = yi;
        lab[size_t(i)] = prufer_label(line, xi);
    }
    // Per cell: the number of integers crossed by the label equals the number of roots.
    std::vector<double> roots;
    std::vector<long> labels;
    for (long i = 0; i < n; ++i) {
        const double a = x[size_t(i)], b = x[size_t(i) + 1];
        const double fa = y[size_t(i)], fb = y[size_t(i) + 1];
        std::vector<double> cell;
        if (fa != 0.0 && fb != 0.0 && (fa > 0) != (fb > 0)) {
            boost::uintmax_t iters = 300;
            const auto r = boost::math::tools::toms748_solve(g, a, b, fa, fb,
                                                             boost::math::tools::eps_tolerance<double>(52), iters);
            cell.push_back(0.5 * (r.first + r.second));
        } else if ((fa == 0.0 && i == 0) || (fb == 0.0 && i + 1 == n)) {
            cell.push_back(fa == 0.0 ? a : b);
        }
        if (zero_mode && a < 0.0 && b > 0.0) cell.push_back(0.0);
        std::sort(cell.begin(), cell.end());
        const long first = long(std::floor(lab[size_t(i)]));
        const long crossed = long(std::floor(lab[size_t(i) + 1])) - first;
        if (crossed != long(cell.size())) {
            std::ostringstream os;
            os << "cell [" << a << ", " << b << "] holds " << cell.size() << " roots, label crosses " << crossed;
            return {false, os.str()};
        }
        for (size_t j = 0; j < cell.size(); ++j) {
            roots.push_back(cell[j]);
            labels.push_back(first + 1 + long(j));
        }
    }
    out.roots = std::move(roots);
    out.labels = std::move(labels);
    return {true, {}};
}

}  // namespace

ModeRoots mode_roots(const ModeLine& line, double lo, double hi, const SecularOptions& opt)
{
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("mode_roots: window bounds must be finite with lo < hi");
    const double len = line.length();
    if (!(len > 0)) throw std::invalid_argument("mode_roots: mode line has zero length");
    ModeRoots out;
    out.lo = lo;
    out.hi = hi;
    out.zero_label = prufer_label(line, 0.0);
    out.zero_mode = std::abs(out.zero_label - std::round(out.zero_label)) <= 1e-12 * std::max(1.0, std::abs(out.zero_label));
    double h = opt.step_factor * pi / len;
    std::string last_error;
    for (int e = 0; e <= opt.max_escalations; ++e, h *= 0.5) {
        const Attempt a = scan_roots(line, lo, hi, h, out.zero_mode, out);
        if (a.ok) {
            out.step = h;
            out.escalations = e;
            return out;
        }
        last_error = a.why;
    }
    throw RootBracketingError("secular root bracketing failed after refinement: " + last_error);
}

double EndSpec::angle(int mode) const
{
    switch (kind) {
        case EndCondition::aps_greater:
        case EndCondition::aps_greater_equal:
        case EndCondition::f_zero:
            return pi / 2;
        case EndCondition::aps_less:
        case EndCondition::g_zero:
            return 0.0;
        case EndCondition::line:
            if (angles.empty()) throw std::invalid_argument("line boundary condition without angle");
            return angles[size_t(mode) % angles.size()];
    }
    return 0.0;
}

CylinderModel CylinderModel::aps_both_ends(const TangentialModel& t, double R)
{
    CylinderModel m;
    m.tangential = t;
    m.R = R;
    m.left = {EndCondition::aps_greater_equal, {}};
    m.right = {EndCondition::aps_less, {}};
    m.name = "aps_cylinder";
    return m;
}

void CylinderModel::validate() const
{
    tangential.validate();
    if (!(R > 0) || !std::isfinite(R)) throw std::invalid_argument("cylinder model: length must be positive");
    for (const auto& s : shifts) {
        if (s.start < -1e-12 || s.length < 0 || s.start + s.length > R + 1e-12)
            throw std::invalid_argument("cylinder model: shift outside [0, R]");
        if (s.values.empty()) throw std::invalid_argument("cylinder model: shift without values");
    }
}

ModeLine mode_line(const CylinderModel& model, int mode)
{
    model.validate();
    std::vector<double> cuts{0.0, model.R};
    for (const auto& s : model.shifts) {
        cuts.push_back(std::clamp(s.start, 0.0, model.R));
        cuts.push_back(std::clamp(s.start + s.length, 0.0, model.R));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    ModeLine line;
    const double lam = model.tangential.lambdas[size_t(mode)];
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a <= 0) continue;
        const double mid = 0.5 * (a + b);
        double l = lam;
        for (const auto& s : model.shifts)
            if (mid > s.start && mid < s.start + s.length) l += s.values[size_t(mode) % s.values.size()];
        if (!line.segments.empty() && line.segments.back().lambda == l)
            line.segments.back().length += b - a;
        else
            line.segments.push_back({b - a, l});
    }
    line.alpha_left = model.left.angle(mode);
    line.alpha_right = model.right.angle(mode);
    return line;
}

double default_window(const CylinderModel& model) { return model.tangential.lambda_max() + 10.0 * pi / model.R; }

SpectrumFamily aps_cylinder_spectrum(const CylinderModel& model, double window, const SecularOptions& opt)
{
    model.validate();
    if (window <= 0) window = default_window(model);
    if (!std::isfinite(window)) throw std::invalid_argument("aps_cylinder_spectrum: window must be finite");
    struct Item {
        double value;
        int mode;
        long label;
    };
    std::vector<Item> items;
    SpectrumFamily f;
    f.kind = SpectrumKind::secular;
    f.window = window;
    f.model_name = model.name;
    for (int k = 0; k < model.tangential.modes(); ++k) {
        const ModeLine line = mode_line(model, k);
        const double len = line.length();
        const double x0 = prufer_label(line, 0.0);
        const double y0 = -(line.alpha_left - line.alpha_right) / pi;
        const double need_lo = std::floor(std::min(x0, y0)) - 1;
        const double need_hi = std::ceil(std::max(x0, y0)) + 1;
        double w = window;
        for (int it = 0; it < 60; ++it) {
            if (prufer_label(line, -w) <= need_lo && prufer_label(line, w) >= need_hi) break;
            w = 1.5 * w + pi / len;
        }
        const ModeRoots r = mode_roots(line, -w, w, opt);
        ModeAsymptotics md;
        md.mode = k;
        md.multiplicity = model.tangential.multiplicity(k);
        md.length = len;
        md.phase = line.alpha_left - line.alpha_right;
        md.zero_label = r.zero_label;
        md.zero_mode = r.zero_mode;
        if (!r.labels.empty()) {
            md.label_min = r.labels.front();
            md.label_max = r.labels.back();
        }
        f.mode_data.push_back(md);
        for (size_t i = 0; i < r.roots.size(); ++i) items.push_back({r.roots[i], k, r.labels[i]});
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.value < b.value; });
    for (const auto& it : items) {
        f.values.push_back(it.value);
        f.multiplicities.push_back(model.tangential.multiplicity(it.mode));
        f.modes.push_back(it.mode);
        f.labels.push_back(it.label);
    }
    f.symmetric = negation_closed(f.values, f.multiplicities);
    return f;
}

CircleModel circle_spectrum(double a, int K)
{
    if (K < 1) throw std::invalid_argument("circle_spectrum: K must be at least 1");
    std::vector<double> v;
    for (int k = -K; k <= K; ++k) v.push_back(k + a);
    CircleModel c;
    c.spectrum = SpectrumFamily::explicit_spectrum(v);
    c.spectrum.model_name = "circle";
    const int n = 2 * K + 1;
    const double h = 2 * pi / n;
    c.matrix = CMatrix<double>::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const int d = i - j;
            const double entry = 0.5 * ((d % 2 == 0) ? 1.0 : -1.0) / std::sin(d * h / 2);
            c.matrix(i, j) = Complex<double>(0, -1) * entry;
        }
        c.matrix(i, i) = a;
    }
    return c;
}

SpectrumFamily torus_spectrum(const TangentialModel& model, double L, int J)
{
    model.validate();
    if (!(L > 0)) throw std::invalid_argument("torus_spectrum: circumference must be positive");
    if (J < 0) throw std::invalid_argument("torus_spectrum: cutoff must be nonnegative");
    std::map<double, int> count;
    for (int k = 0; k < model.modes(); ++k)
        for (int j = -J; j <= J; ++j) {
            const double xi = 2 * pi * j / L;
            const double lam = model.lambdas[size_t(k)];
            const double e = std::sqrt(lam * lam + xi * xi);
            count[e] += model.multiplicity(k);
            count[-e] += model.multiplicity(k);
        }
    std::vector<double> v;
    std::vector<int> m;
    for (const auto& [e, c] : count) {
        v.push_back(e);
        m.push_back(c);
    }
    auto f = SpectrumFamily::explicit_spectrum(v, m);
    f.model_name = "torus";
    return f;
}

KernelCount defect_kernel_dimension(const DefectModel& model, double zero_tol, double marginal_tol)
{
    model.tangential.validate();
    KernelCount kc;
    for (int k = 0; k < model.tangential.modes(); ++k) {
        double v = 0;
        if (!model.shifts.empty()) v = model.shifts[size_t(k) % model.shifts.size()];
        const Segment defect{model.width, model.tangential.lambdas[size_t(k)] + v};
        const double alpha = model.cap.angle(k);
        const Eigen::Vector2d cap(std::cos(alpha), std::sin(alpha));
        double det;
        if (model.extends_right) {
            // decaying at +infinity: f e^{-lambda u}
            const Eigen::Vector2d w = propagate_direction(0.0, defect, Eigen::Vector2d(1, 0), true);
            det = cap(0) * w(1) - cap(1) * w(0);
        } else {
            // decaying at -infinity: g e^{lambda u}
            const Eigen::Vector2d w = propagate_direction(0.0, defect, Eigen::Vector2d(0, 1));
            det = w(0) * cap(1) - w(1) * cap(0);
        }
        const bool bound = std::abs(det) <= zero_tol;
        const bool marginal = !bound && std::abs(det) <= marginal_tol;
        kc.per_mode.push_back(bound ? 1 : 0);
        kc.matching_determinant.push_back(det);
        kc.marginal.push_back(marginal);
        kc.any_marginal = kc.any_marginal || marginal;
        if (bound) kc.q += model.tangential.multiplicity(k);
    }
    return kc;
}

CylinderModel finite_model(const DefectModel& model)
{
    if (!(model.length > model.width)) throw std::invalid_argument("finite defect model: length must exceed width");
    CylinderModel c;
    c.tangential = model.tangential;
    c.R = model.length;
    std::vector<double> v = model.shifts;
    if (v.empty()) v.assign(1, 0.0);
    if (model.extends_right) {
        c.left = model.cap;
        c.right = {EndCondition::aps_less, {}};
        c.shifts.push_back({0.0, model.width, v});
    } else {
        c.left = {EndCondition::aps_greater, {}};
        c.right = model.cap;
        c.shifts.push_back({model.length - model.width, model.width, v});
    }
    c.name = "defect_truncated";
    return c;
}

namespace {

void add_shift(CylinderModel& c, double start, double width, const std::vector<double>& v)
{
    if (v.empty() || width <= 0) return;
    c.shifts.push_back({start, width, v});
}

}  // namespace

CylinderModel closed_model(const SplitModel& m)
{
    CylinderModel c;
    c.tangential = m.tangential;
    c.R = 2 * m.half_length();
    c.left = m.cap_left;
    c.right = m.cap_right;
    add_shift(c, 0.0, m.defect_width, m.shift_left);
    add_shift(c, c.R - m.defect_width, m.defect_width, m.shift_right);
    c.name = m.name + ":closed";
    return c;
}

CylinderModel left_half(const SplitModel& m)
{
    CylinderModel c;
    c.tangential = m.tangential;
    c.R = m.half_length();
    c.left = m.cap_left;
    c.right = {EndCondition::aps_less, {}};
    add_shift(c, 0.0, m.defect_width, m.shift_left);
    c.name = m.name + ":M1";
    return c;
}

CylinderModel right_half(const SplitModel& m)
{
    CylinderModel c;
    c.tangential = m.tangential;
    c.R = m.half_length();
    c.left = {EndCondition::aps_greater, {}};
    c.right = m.cap_right;
    add_shift(c, c.R - m.defect_width, m.defect_width, m.shift_right);
    c.name = m.name + ":M2";
    return c;
}

DefectModel left_side(const SplitModel& m)
{
    DefectModel d;
    d.tangential = m.tangential;
    d.shifts = m.shift_left;
    d.width = m.defect_width;
    d.cap = m.cap_left;
    d.extends_right = true;
    return d;
}

DefectModel right_side(const SplitModel& m)
{
    DefectModel d;
    d.tangential = m.tangential;
    d.shifts = m.shift_right;
    d.width = m.defect_width;
    d.cap = m.cap_right;
    d.extends_right = false;
    return d;
}

std::vector<ModeCauchyData> cauchy_data_graph(const TangentialModel& model, double R)
{
    model.validate();
    if (!(R > 0)) throw std::invalid_argument("cauchy_data_graph: R must be positive");
    Eigen::Matrix2d sig;
    sig << 0, -1, 1, 0;
    std::vector<ModeCauchyData> out;
    for (int k = 0; k < model.modes(); ++k) {
        ModeCauchyData d;
        d.lambda = model.lambdas[size_t(k)];
        d.multiplicity = model.multiplicity(k);
        if (std::isinf(R)) {
            d.space.J = -sig;
            RMatrix<double> c(2, 1);
            c << 1, 0;
            d.cauchy = {c};
            d.positive = {c};
            d.coefficient = 0;
            d.angle = 0;
            d.min_angle_sine = 0;
            d.transversal = false;
        } else {
            RMatrix<double> j = RMatrix<double>::Zero(4, 4);
            j.topLeftCorner(2, 2) = -sig;
            j.bottomRightCorner(2, 2) = sig;
            d.space.J = j;
            d.coefficient = std::exp(-d.lambda * R);
            const double e = d.coefficient;
            RMatrix<double> c(4, 2);
            c.col(0) << 1, 0, e, 0;  // f-solution e^{-lambda u}
            c.col(1) << 0, e, 0, 1;  // g-solution e^{lambda (u - R)}
            c.col(0).normalize();
            c.col(1).normalize();
            d.cauchy = {c};
            RMatrix<double> p = RMatrix<double>::Zero(4, 2);
            p(0, 0) = 1;  // phi_k at Sigma_0
            p(3, 1) = 1;  // sigma phi_k at Sigma_R: positive for -B
            d.positive = {p};
            d.angle = std::atan(e);
            d.min_angle_sine = principal_angle_sines<double>(d.positive.frame, d.cauchy.frame).minCoeff();
            const auto pair = fredholm_pair_index(d.space, d.positive, d.cauchy);
            d.transversal = pair.intersection == 0 && pair.codim_sum == 0;
        }
        out.push_back(d);
    }
    return out;
}

DecayReport sobolev_decay_coefficients(const std::vector<ModeCoefficient>& coefficients, double R)
{
    if (!(R > 0)) throw std::invalid_argument("sobolev_decay_coefficients: R must be positive");
    DecayReport r;
    for (const auto& c : coefficients) {
        if (c.lambda == 0) throw std::invalid_argument("sobolev_decay_coefficients: B is invertible");
        const double a2 = c.a * c.a;
        const double l = std::abs(c.lambda);
        if (c.lambda < 0) {
            r.negative_norm += a2 * std::expm1(2 * l * R) / (2 * l);
            r.negative_weighted += a2 * std::exp(2 * l * R) / l;
            r.trace_negative_start += a2;
            r.trace_negative_end += a2 * std::exp(2 * l * R);
        } else {
            r.positive_norm += a2 * (-std::expm1(-2 * l * R)) / (2 * l);
            r.positive_weighted += a2 / l;
            r.trace_positive_start += a2;
            r.trace_positive_end += a2 * std::exp(-2 * l * R);
        }
    }
    r.l2_norm_squared = r.negative_norm + r.positive_norm;
    r.finite = std::isfinite(r.negative_weighted) && std::isfinite(r.positive_weighted) &&
               std::isfinite(r.l2_norm_squared);
    return r;
}

}  // namespace spectral
