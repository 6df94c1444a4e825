#pragma once

#include <string>
#include <vector>

namespace spectral {

enum class SpectrumKind { explicit_list, arithmetic, secular };

// Per-mode data of a secular-root family. Roots are labelled by integers n so that
// mu_n ~ (n pi + phase)/length for |n| large; zero_label is the real number x0
// with mu_n < 0 for n < x0 and mu_n > 0 for n > x0.
struct ModeAsymptotics {
    int mode = 0;
    int multiplicity = 1;
    double length = 0;
    double phase = 0;
    double zero_label = 0;
    long label_min = 0;
    long label_max = -1;
    bool zero_mode = false;
};

struct SpectrumFamily {
    SpectrumKind kind = SpectrumKind::explicit_list;
    std::vector<double> values;       // sorted ascending (explicit, secular)
    std::vector<int> multiplicities;  // parallel to values
    std::vector<int> modes;           // secular: mode index per value
    std::vector<long> labels;         // secular: root label per value
    double a = 0;                     // arithmetic: {k + a : k in Z}
    bool symmetric = false;
    std::vector<ModeAsymptotics> mode_data;
    double window = 0;
    std::string model_name;

    static SpectrumFamily explicit_spectrum(std::vector<double> values, std::vector<int> multiplicities = {});
    static SpectrumFamily arithmetic(double a);

    int total_multiplicity() const;
    int zero_count(double tol = 0.0) const;
};

// True iff the multiset (values, multiplicities) is closed under negation up to tol.
bool negation_closed(const std::vector<double>& values, const std::vector<int>& multiplicities, double tol = 1e-12);

}  // namespace spectral
