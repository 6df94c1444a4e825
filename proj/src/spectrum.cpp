#include "spectral/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace spectral {

SpectrumFamily SpectrumFamily::explicit_spectrum(std::vector<double> values, std::vector<int> multiplicities)
{
    if (multiplicities.empty()) multiplicities.assign(values.size(), 1);
    if (multiplicities.size() != values.size())
        throw std::invalid_argument("explicit spectrum: multiplicities must match values");
    std::vector<size_t> order(values.size());
    std::iota(order.begin(), order.end(), size_t(0));
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return values[i] < values[j]; });
    SpectrumFamily f;
    f.kind = SpectrumKind::explicit_list;
    for (size_t i : order) {
        if (multiplicities[i] < 1) throw std::invalid_argument("explicit spectrum: multiplicity must be positive");
        f.values.push_back(values[i]);
        f.multiplicities.push_back(multiplicities[i]);
    }
    f.symmetric = negation_closed(f.values, f.multiplicities);
    return f;
}

SpectrumFamily SpectrumFamily::arithmetic(double a)
{
    SpectrumFamily f;
    f.kind = SpectrumKind::arithmetic;
    const double frac = a - std::floor(a);
    if (!(frac > 0.0 && frac < 1.0)) throw std::invalid_argument("arithmetic spectrum: a must not be an integer");
    f.a = frac;
    f.symmetric = std::abs(frac - 0.5) < 1e-15;
    return f;
}

int SpectrumFamily::total_multiplicity() const
{
    return std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
}

int SpectrumFamily::zero_count(double tol) const
{
    int z = 0;
    for (size_t i = 0; i < values.size(); ++i)
        if (std::abs(values[i]) <= tol) z += multiplicities[i];
    return z;
}

bool negation_closed(const std::vector<double>& values, const std::vector<int>& multiplicities, double tol)
{
    std::vector<std::pair<double, int>> pos, neg;
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] > tol)
            pos.emplace_back(values[i], multiplicities[i]);
        else if (values[i] < -tol)
            neg.emplace_back(-values[i], multiplicities[i]);
    }
    auto collapse = [tol](std::vector<std::pair<double, int>> v) {
        std::sort(v.begin(), v.end());
        std::vector<std::pair<double, int>> out;
        for (const auto& p : v) {
            if (!out.empty() && std::abs(out.back().first - p.first) <= tol)
                out.back().second += p.second;
            else
                out.push_back(p);
        }
        return out;
    };
    const auto a = collapse(pos), b = collapse(neg);
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i].first - b[i].first) > tol || a[i].second != b[i].second) return false;
    return true;
}

}  // namespace spectral
