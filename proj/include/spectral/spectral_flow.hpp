#pragma once

#include "spectral/operator_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

namespace spectral {

template <typename S>
struct OperatorPath {
    std::vector<S> grid;
    std::vector<HermitianOperator<S>> operators;
    // Optional exact family, used to refine subintervals during barrier search.
    std::function<HermitianOperator<S>(S)> family;

    S continuity_bound() const
    {
        S worst = 0;
        for (size_t j = 1; j < operators.size(); ++j)
            worst = std::max(worst, operator_norm<S>(operators[j].matrix() - operators[j - 1].matrix()));
        return worst;
    }
};

template <typename S>
struct UnitaryPath {
    std::vector<S> grid;
    std::vector<UnitaryOperator<S>> unitaries;
    std::function<UnitaryOperator<S>(S)> family;
};

template <typename S>
struct LedgerEntry {
    S t_left = 0;
    S t_right = 0;
    S epsilon = 0;
    int k_left = 0;
    int k_right = 0;
};

template <typename S>
struct CrossingLedger {
    std::vector<LedgerEntry<S>> entries;
    int winding = 0;
};

struct WindingOptions {
    double barrier_margin = 1e-6;
    int max_refinements = 12;
    double zero_angle_tol = 1e-12;
};

class PathTooCoarse : public OperatorError {
public:
    using OperatorError::OperatorError;
};

template <typename S>
OperatorPath<S> sample_path(const std::function<HermitianOperator<S>(S)>& f, S t0, S t1, int samples)
{
    OperatorPath<S> p;
    p.family = f;
    for (int j = 0; j < samples; ++j) {
        const S t = (j + 1 == samples) ? t1 : t0 + (t1 - t0) * S(j) / S(samples - 1);
        p.grid.push_back(t);
        p.operators.push_back(f(t));
    }
    return p;
}

template <typename S>
UnitaryPath<S> sample_unitary_path(const std::function<UnitaryOperator<S>(S)>& f, S t0, S t1, int samples)
{
    UnitaryPath<S> p;
    p.family = f;
    for (int j = 0; j < samples; ++j) {
        const S t = (j + 1 == samples) ? t1 : t0 + (t1 - t0) * S(j) / S(samples - 1);
        p.grid.push_back(t);
        p.unitaries.push_back(f(t));
    }
    return p;
}

// Signed angles arg(-z) in (-pi, pi] of the eigenvalues z of U, i.e. offsets from -1.
template <typename S>
std::vector<S> phase_offsets_from_minus_one(const UnitaryOperator<S>& u)
{
    Eigen::ComplexEigenSolver<CMatrix<S>> es(u.matrix(), false);
    std::vector<S> out;
    out.reserve(size_t(u.dim()));
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) out.push_back(std::arg(-es.eigenvalues()(j)));
    return out;
}

// k(t, eps): eigenvalues e^{i(pi+theta)} with 0 <= theta < eps, with multiplicity.
template <typename S>
int count_in_arc(const std::vector<S>& offsets, S eps, S zero_tol)
{
    int k = 0;
    for (S d : offsets)
        if (d >= -zero_tol && d < eps) ++k;
    return k;
}

namespace detail {

template <typename S>
struct BarrierChoice {
    S epsilon = 0;
    S half_width = 0;
};

template <typename S>
BarrierChoice<S> widest_gap(const std::vector<S>& a, const std::vector<S>& b)
{
    std::vector<S> pts{S(0), std::numbers::pi_v<S>};
    for (S d : a)
        if (d > 0 && d < std::numbers::pi_v<S>) pts.push_back(d);
    for (S d : b)
        if (d > 0 && d < std::numbers::pi_v<S>) pts.push_back(d);
    std::sort(pts.begin(), pts.end());
    BarrierChoice<S> best;
    for (size_t j = 1; j < pts.size(); ++j) {
        const S h = (pts[j] - pts[j - 1]) / 2;
        if (h > best.half_width) best = {pts[j - 1] + h, h};
    }
    return best;
}

template <typename S>
void wind_interval(const UnitaryPath<S>& path, S ta, const UnitaryOperator<S>& ua, S tb,
                   const UnitaryOperator<S>& ub, int depth, const WindingOptions& opt, CrossingLedger<S>& ledger)
{
    const auto oa = phase_offsets_from_minus_one(ua);
    const auto ob = phase_offsets_from_minus_one(ub);
    // Eigenvalues of unitaries move (in optimal matching) by at most the norm difference.
    const S chord = operator_norm<S>(ua.matrix() - ub.matrix());
    const S movement = chord >= S(2) ? std::numbers::pi_v<S> : S(2) * std::asin(chord / S(2));
    const auto gap = widest_gap(oa, ob);
    if (gap.half_width > std::max(S(opt.barrier_margin), movement)) {
        const S z = S(opt.zero_angle_tol);
        LedgerEntry<S> e{ta, tb, gap.epsilon, count_in_arc(oa, gap.epsilon, z), count_in_arc(ob, gap.epsilon, z)};
        ledger.entries.push_back(e);
        ledger.winding += e.k_right - e.k_left;
        return;
    }
    if (!path.family || depth >= opt.max_refinements) {
        std::ostringstream os;
        os << "path too coarse on [" << ta << ", " << tb << "]";
        throw PathTooCoarse(os.str());
    }
    const S tm = (ta + tb) / 2;
    const UnitaryOperator<S> um = path.family(tm);
    wind_interval(path, ta, ua, tm, um, depth + 1, opt, ledger);
    wind_interval(path, tm, um, tb, ub, depth + 1, opt, ledger);
}

}  // namespace detail

template <typename S>
CrossingLedger<S> winding_through_minus_one(const UnitaryPath<S>& path, const WindingOptions& opt = {})
{
    if (path.grid.size() != path.unitaries.size() || path.grid.size() < 2)
        throw OperatorError("winding: path needs at least two samples");
    for (size_t j = 1; j < path.grid.size(); ++j)
        if (!(path.grid[j] > path.grid[j - 1])) throw OperatorError("winding: grid must be strictly ascending");
    CrossingLedger<S> ledger;
    for (size_t j = 1; j < path.grid.size(); ++j)
        detail::wind_interval(path, path.grid[j - 1], path.unitaries[j - 1], path.grid[j], path.unitaries[j], 0,
                              opt, ledger);
    return ledger;
}

template <typename S>
UnitaryPath<S> cayley_path(const OperatorPath<S>& path)
{
    UnitaryPath<S> u;
    u.grid = path.grid;
    for (const auto& h : path.operators) u.unitaries.push_back(cayley(h));
    if (path.family) {
        auto f = path.family;
        u.family = [f](S t) { return cayley(f(t)); };
    }
    return u;
}

template <typename S>
CrossingLedger<S> spectral_flow_ledger(const OperatorPath<S>& path, const WindingOptions& opt = {})
{
    return winding_through_minus_one(cayley_path(path), opt);
}

template <typename S>
int spectral_flow(const OperatorPath<S>& path, const WindingOptions& opt = {})
{
    return spectral_flow_ledger(path, opt).winding;
}

// Branches are the sorted eigenvalues. A branch counts +1 when it moves from
// negative to nonnegative between consecutive samples and -1 for the reverse.
template <typename S>
int crossing_count_oracle(const OperatorPath<S>& path, S zero_tol = S(1e-12))
{
    if (path.operators.size() < 2) throw OperatorError("crossing oracle: path needs at least two samples");
    std::vector<RVector<S>> ev;
    for (const auto& h : path.operators) ev.push_back(spectral_resolution(h).eigenvalues);
    int total = 0;
    for (size_t j = 1; j < ev.size(); ++j) {
        const RVector<S>& a = ev[j - 1];
        const RVector<S>& b = ev[j];
        S move = 0, spacing = std::numeric_limits<S>::infinity();
        for (Eigen::Index i = 0; i < a.size(); ++i) move = std::max(move, std::abs(b(i) - a(i)));
        for (Eigen::Index i = 1; i < a.size(); ++i) {
            spacing = std::min(spacing, a(i) - a(i - 1));
            spacing = std::min(spacing, b(i) - b(i - 1));
        }
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const bool na = a(i) < -zero_tol, nb = b(i) < -zero_tol;
            if (na == nb) continue;
            // Pairing by sorted order is unambiguous only when branches near zero
            // cannot swap within one step.
            if (move > spacing / 2 && spacing > zero_tol)
                throw OperatorError("crossing oracle: unresolvable branch pairing, refine the grid");
            total += na ? 1 : -1;
        }
    }
    return total;
}

template <typename S>
OperatorPath<S> concatenate(const OperatorPath<S>& f, const OperatorPath<S>& g)
{
    OperatorPath<S> out;
    const S shift = f.grid.back() - g.grid.front();
    out.grid = f.grid;
    out.operators = f.operators;
    for (size_t j = 1; j < g.grid.size(); ++j) {
        out.grid.push_back(g.grid[j] + shift);
        out.operators.push_back(g.operators[j]);
    }
    if (f.family && g.family) {
        const S split = f.grid.back();
        auto ff = f.family, gf = g.family;
        out.family = [=](S t) { return t <= split ? ff(t) : gf(t - shift); };
    }
    return out;
}

template <typename S>
OperatorPath<S> reversed(const OperatorPath<S>& f)
{
    OperatorPath<S> out;
    const S a = f.grid.front(), b = f.grid.back();
    for (size_t j = f.grid.size(); j-- > 0;) {
        out.grid.push_back(a + b - f.grid[j]);
        out.operators.push_back(f.operators[j]);
    }
    if (f.family) {
        auto ff = f.family;
        out.family = [=](S t) { return ff(a + b - t); };
    }
    return out;
}

template <typename S>
void write_ledger_csv(std::ostream& os, const CrossingLedger<S>& ledger)
{
    os << "t_left,t_right,epsilon,k_left,k_right\n";
    os.precision(17);
    for (const auto& e : ledger.entries)
        os << e.t_left << ',' << e.t_right << ',' << e.epsilon << ',' << e.k_left << ',' << e.k_right << '\n';
}

}  // namespace spectral
