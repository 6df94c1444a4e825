#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral {

using Rational = boost::multiprecision::cpp_rational;

// Exponents per generator name, e.g. {p1: 2, p2: 1}. The empty monomial is 1.
using Monomial = std::map<std::string, int>;

class SeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Truncated power series in even-degree generators with exact rational coefficients.
struct GradedSeries {
    std::map<std::string, int> degrees;  // generator -> degree
    std::map<Monomial, Rational> terms;  // nonzero coefficients only
    int truncation = 0;                  // terms of degree > truncation are dropped

    static GradedSeries constant(const Rational& c, int truncation);
    static GradedSeries generator(const std::string& name, int degree, int truncation);

    int degree(const Monomial& m) const;
    Rational coefficient(const Monomial& m) const;
    GradedSeries component(int degree) const;
    std::vector<int> nonzero_degrees() const;
    void add_term(const Monomial& m, const Rational& c);

    GradedSeries operator+(const GradedSeries& o) const;
    GradedSeries operator-(const GradedSeries& o) const;
    GradedSeries operator*(const GradedSeries& o) const;
    GradedSeries scaled(const Rational& c) const;
    bool operator==(const GradedSeries& o) const { return terms == o.terms; }

    // Sorted by degree then monomial, e.g. "1 - 1/24 p1 + 7/5760 p1^2 - 1/1440 p2".
    std::string to_string() const;
    // {"p1^2": "7/5760", ...}; the empty monomial is keyed "1".
    std::map<std::string, std::string> coefficient_map() const;
};

// exp(g) for g without constant term, truncated at g.truncation.
GradedSeries series_exp(const GradedSeries& g);

// Power sums P_k = sum_j y_j^k of formal roots expressed through the elementary
// symmetric polynomials e_1..e_n, named prefix + k with degree k * unit_degree.
std::vector<GradedSeries> newton_power_sums(int count, const std::string& prefix, int unit_degree, int truncation,
                                            int max_elementary = 1 << 20);

struct AhatOptions {
    bool tilde = false;  // rescale degree 4k by 2^{2k - m}
    int m = 0;
};

// prod (x_j/2)/sinh(x_j/2) with p_k = e_k(x_1^2, ...), up to max_degree <= 16.
GradedSeries ahat_series(int max_degree, const AhatOptions& opt = {});

// sum_j e^{x_j} for rank formal roots with c_k = e_k(x_1, ..., x_rank).
GradedSeries chern_character(int rank, int max_degree);

// Replace every generator of s by the given series.
GradedSeries substitute(const GradedSeries& s, const std::map<std::string, GradedSeries>& values, int truncation);

struct ChernData {
    int rank = 1;
    std::map<std::string, Rational> numbers;  // e.g. {"c1": 3, "c1^2": 0, "c2": 1}
};

// (ch(E) Â(M))[M] for dim M = n, evaluated on the supplied characteristic numbers.
Rational index_pairing(int n, const ChernData& chern, const std::map<std::string, Rational>& pontryagin);

std::string monomial_name(const Monomial& m);
Monomial parse_monomial(const std::string& s);

}  // namespace spectral
