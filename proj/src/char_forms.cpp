#include "spectral/char_forms.hpp"

#include <algorithm>
#include <sstream>

namespace spectral {

namespace {

Rational factorial(int n)
{
    Rational f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

std::string monomial_name(const Monomial& m)
{
    if (m.empty()) return "1";
    std::string out;
    for (const auto& [name, e] : m) {
        if (!out.empty()) out += ' ';
        out += name;
        if (e != 1) out += '^' + std::to_string(e);
    }
    return out;
}

Monomial parse_monomial(const std::string& s)
{
    Monomial m;
    if (s == "1" || s.empty()) return m;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        // accept "c1^2", "c1*c2" and "c1 c2"
        size_t start = 0;
        while (start < tok.size()) {
            size_t star = tok.find('*', start);
            std::string f = tok.substr(start, star == std::string::npos ? std::string::npos : star - start);
            start = star == std::string::npos ? tok.size() : star + 1;
            if (f.empty()) continue;
            const size_t caret = f.find('^');
            int e = 1;
            if (caret != std::string::npos) {
                e = std::stoi(f.substr(caret + 1));
                f = f.substr(0, caret);
            }
            m[f] += e;
        }
    }
    return m;
}

GradedSeries GradedSeries::constant(const Rational& c, int truncation)
{
    GradedSeries s;
    s.truncation = truncation;
    s.add_term({}, c);
    return s;
}

GradedSeries GradedSeries::generator(const std::string& name, int degree, int truncation)
{
    if (degree <= 0 || degree % 2 != 0) throw SeriesError("generator degrees must be positive and even");
    GradedSeries s;
    s.truncation = truncation;
    s.degrees[name] = degree;
    s.add_term({{name, 1}}, 1);
    return s;
}

int GradedSeries::degree(const Monomial& m) const
{
    int d = 0;
    for (const auto& [name, e] : m) {
        auto it = degrees.find(name);
        if (it == degrees.end()) throw SeriesError("unknown generator " + name);
        d += it->second * e;
    }
    return d;
}

Rational GradedSeries::coefficient(const Monomial& m) const
{
    auto it = terms.find(m);
    return it == terms.end() ? Rational(0) : it->second;
}

GradedSeries GradedSeries::component(int d) const
{
    GradedSeries out;
    out.degrees = degrees;
    out.truncation = truncation;
    for (const auto& [m, c] : terms)
        if (degree(m) == d) out.terms.emplace(m, c);
    return out;
}

std::vector<int> GradedSeries::nonzero_degrees() const
{
    std::vector<int> d;
    for (const auto& [m, c] : terms) d.push_back(degree(m));
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
}

void GradedSeries::add_term(const Monomial& m, const Rational& c)
{
    if (c == 0) return;
    if (degree(m) > truncation) return;
    Rational& slot = terms[m];
    slot += c;
    if (slot == 0) terms.erase(m);
}

namespace {

GradedSeries merged_frame(const GradedSeries& a, const GradedSeries& b)
{
    GradedSeries out;
    out.degrees = a.degrees;
    for (const auto& [name, d] : b.degrees) {
        auto [it, inserted] = out.degrees.emplace(name, d);
        if (!inserted && it->second != d) throw SeriesError("generator " + name + " has two degrees");
    }
    out.truncation = std::min(a.truncation, b.truncation);
    return out;
}

}  // namespace

GradedSeries GradedSeries::operator+(const GradedSeries& o) const
{
    GradedSeries out = merged_frame(*this, o);
    for (const auto& [m, c] : terms) out.add_term(m, c);
    for (const auto& [m, c] : o.terms) out.add_term(m, c);
    return out;
}

GradedSeries GradedSeries::operator-(const GradedSeries& o) const { return *this + o.scaled(-1); }

GradedSeries GradedSeries::operator*(const GradedSeries& o) const
{
    GradedSeries out = merged_frame(*this, o);
    for (const auto& [m1, c1] : terms) {
        const int d1 = degree(m1);
        for (const auto& [m2, c2] : o.terms) {
            if (d1 + o.degree(m2) > out.truncation) continue;
            Monomial m = m1;
            for (const auto& [name, e] : m2) m[name] += e;
            out.add_term(m, c1 * c2);
        }
    }
    return out;
}

GradedSeries GradedSeries::scaled(const Rational& c) const
{
    GradedSeries out;
    out.degrees = degrees;
    out.truncation = truncation;
    for (const auto& [m, v] : terms) out.add_term(m, v * c);
    return out;
}

std::string GradedSeries::to_string() const
{
    std::vector<std::pair<int, Monomial>> order;
    for (const auto& [m, c] : terms) order.emplace_back(degree(m), m);
    std::sort(order.begin(), order.end());
    std::string out;
    for (const auto& [d, m] : order) {
        Rational c = terms.at(m);
        const bool negative = c < 0;
        if (negative) c = -c;
        if (out.empty()) out += negative ? "-" : "";
        else out += negative ? " - " : " + ";
        if (m.empty()) out += c.str();
        else {
            if (c != 1) out += c.str() + " ";
            out += monomial_name(m);
        }
    }
    return out.empty() ? "0" : out;
}

std::map<std::string, std::string> GradedSeries::coefficient_map() const
{
    std::map<std::string, std::string> out;
    for (const auto& [m, c] : terms) out[monomial_name(m)] = c.str();
    return out;
}

GradedSeries series_exp(const GradedSeries& g)
{
    if (g.coefficient({}) != 0) throw SeriesError("series_exp: argument has a constant term");
    GradedSeries out = GradedSeries::constant(1, g.truncation);
    out.degrees = g.degrees;
    GradedSeries power = out;
    int min_degree = g.truncation + 1;
    for (const auto& [m, c] : g.terms) min_degree = std::min(min_degree, g.degree(m));
    for (int n = 1; n * min_degree <= g.truncation; ++n) {
        power = (power * g).scaled(Rational(1, n));
        out = out + power;
    }
    return out;
}

std::vector<GradedSeries> newton_power_sums(int count, const std::string& prefix, int unit_degree, int truncation,
                                            int max_elementary)
{
    // P_k = sum_{i=1}^{k-1} (-1)^{i-1} e_i P_{k-i} + (-1)^{k-1} k e_k, with e_i = 0 for i > max_elementary
    std::vector<GradedSeries> e(size_t(count) + 1), p(size_t(count) + 1);
    GradedSeries zero = GradedSeries::constant(0, truncation);
    for (int k = 1; k <= count; ++k) {
        if (k <= max_elementary && k * unit_degree <= truncation)
            e[size_t(k)] = GradedSeries::generator(prefix + std::to_string(k), k * unit_degree, truncation);
        else
            e[size_t(k)] = zero;
    }
    for (int k = 1; k <= count; ++k) {
        GradedSeries pk = e[size_t(k)].scaled(Rational((k % 2 == 1) ? k : -k));
        for (int i = 1; i < k; ++i) {
            const GradedSeries term = e[size_t(i)] * p[size_t(k - i)];
            pk = pk + term.scaled(i % 2 == 1 ? 1 : -1);
        }
        p[size_t(k)] = pk;
    }
    p.erase(p.begin());
    return p;
}

namespace {

// log((x/2)/sinh(x/2)) = -sum_k h_k y^k in y = x^2.
std::vector<Rational> log_sinhc_coefficients(int kmax)
{
    // f(y) = sinh(x/2)/(x/2) = sum y^k / (4^k (2k+1)!); k h_k = k f_k - sum_{j<k} j h_j f_{k-j}
    std::vector<Rational> f(size_t(kmax) + 1), h(size_t(kmax) + 1);
    Rational four_k = 1;
    for (int k = 0; k <= kmax; ++k) {
        f[size_t(k)] = 1 / (four_k * factorial(2 * k + 1));
        four_k *= 4;
    }
    for (int k = 1; k <= kmax; ++k) {
        Rational acc = k * f[size_t(k)];
        for (int j = 1; j < k; ++j) acc -= j * h[size_t(j)] * f[size_t(k - j)];
        h[size_t(k)] = acc / k;
    }
    return h;
}

}  // namespace

GradedSeries ahat_series(int max_degree, const AhatOptions& opt)
{
    if (max_degree < 0 || max_degree > 16) throw SeriesError("ahat_series: max_degree must lie in [0, 16]");
    const int kmax = max_degree / 4;
    const auto h = log_sinhc_coefficients(std::max(kmax, 1));
    const auto p = newton_power_sums(std::max(kmax, 1), "p", 4, max_degree);
    GradedSeries log_ahat = GradedSeries::constant(0, max_degree);
    for (int k = 1; k <= kmax; ++k) log_ahat = log_ahat + p[size_t(k - 1)].scaled(-h[size_t(k)]);
    GradedSeries a = series_exp(log_ahat);
    for (int k = 1; k <= kmax; ++k) a.degrees.emplace("p" + std::to_string(k), 4 * k);
    if (!opt.tilde) return a;
    GradedSeries out = GradedSeries::constant(0, max_degree);
    out.degrees = a.degrees;
    for (int d : a.nonzero_degrees()) {
        const int k = d / 4;
        const int e = 2 * k - opt.m;
        const Rational scale = e >= 0 ? Rational(boost::multiprecision::cpp_int(1) << e)
                                      : Rational(1, boost::multiprecision::cpp_int(1) << -e);
        out = out + a.component(d).scaled(scale);
    }
    return out;
}

GradedSeries chern_character(int rank, int max_degree)
{
    if (rank < 1) throw SeriesError("chern_character: rank must be positive");
    if (max_degree < 0) throw SeriesError("chern_character: max_degree must be nonnegative");
    const int kmax = max_degree / 2;
    GradedSeries ch = GradedSeries::constant(rank, max_degree);
    if (kmax == 0) return ch;
    const auto p = newton_power_sums(kmax, "c", 2, max_degree, rank);
    for (int k = 1; k <= kmax; ++k) ch = ch + p[size_t(k - 1)].scaled(1 / factorial(k));
    for (int k = 1; k <= std::min(kmax, rank); ++k) ch.degrees.emplace("c" + std::to_string(k), 2 * k);
    return ch;
}

GradedSeries substitute(const GradedSeries& s, const std::map<std::string, GradedSeries>& values, int truncation)
{
    GradedSeries out = GradedSeries::constant(0, truncation);
    for (const auto& [name, v] : values)
        for (const auto& [g, d] : v.degrees) out.degrees.emplace(g, d);
    for (const auto& [m, c] : s.terms) {
        GradedSeries term = GradedSeries::constant(c, truncation);
        for (const auto& [name, e] : m) {
            auto it = values.find(name);
            if (it == values.end()) throw SeriesError("substitute: no value for " + name);
            for (int i = 0; i < e; ++i) term = term * it->second;
        }
        out = out + term;
    }
    return out;
}

Rational index_pairing(int n, const ChernData& chern, const std::map<std::string, Rational>& pontryagin)
{
    if (n < 0 || n % 2 != 0) throw SeriesError("index_pairing: dimension must be even and nonnegative");
    if (n > 16) throw SeriesError("index_pairing: dimension above 16 is not supported");
    const GradedSeries product = chern_character(chern.rank, n) * ahat_series(n);
    std::map<Monomial, Rational> numbers;
    for (const auto* table : {&chern.numbers, &pontryagin})
        for (const auto& [k, v] : *table) numbers[parse_monomial(k)] = v;
    Rational out = 0;
    for (const auto& [m, c] : product.component(n).terms) {
        auto it = numbers.find(m);
        if (it == numbers.end()) throw SeriesError("index_pairing: missing value for " + monomial_name(m));
        out += c * it->second;
    }
    return out;
}

}  // namespace spectral
