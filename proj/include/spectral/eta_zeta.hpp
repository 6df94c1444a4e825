#pragma once

#include "spectral/operator_core.hpp"
#include "spectral/spectrum.hpp"

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral {

enum class EtaMethod { automatic, hurwitz_oracle, erfc_extrapolation, finite_signed_count, reference_subtraction };

std::string to_string(EtaMethod m);

class EtaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EtaResult {
    double eta0 = 0;
    EtaMethod method = EtaMethod::automatic;
    double error_estimate = 0;
    double mod_z_class = 0;  // eta0 mod 1 in [0, 1)
    int zero_modes = 0;      // excluded from the sum, reported separately
    std::vector<double> t_grid;
    std::vector<double> g_values;
    std::vector<double> increments;  // last row of the extrapolation tableau
};

struct EtaOptions {
    EtaMethod method = EtaMethod::automatic;
    double t0 = 0.1;
    int levels = 9;             // t_j = t0 4^{-j}, j < levels
    double error_budget = 1e-6;
};

struct PartialSum {
    std::complex<double> value;
    double tail_bound = 0;
    long terms = 0;
};

// sum sign(lambda) |lambda|^{-s}. Infinite families need Re(s) > 1 unless continuation is
// set, in which case arithmetic families are continued through the Hurwitz combination.
PartialSum eta_partial_sum(const SpectrumFamily& spec, std::complex<double> s, long cutoff = 1000,
                           bool continuation = false);

// Sum of m sign(lambda) erfc(|lambda| sqrt(t)) over the family (arithmetic: |k| <= K).
double erfc_signed_sum(const SpectrumFamily& spec, double t, long cutoff);

EtaResult eta_invariant(const SpectrumFamily& spec, const EtaOptions& opt = {});

double fractional_part(double x);

// Representative of x mod 1 in [-1/2, 1/2).
double centered_mod_one(double x);

enum class Branch { plus_i_pi, minus_i_pi };  // (-1)^{-s} = e^{+i pi s} (default) or e^{-i pi s}

struct ZetaResult {
    double zeta0 = 0;
    double zeta_prime0 = 0;    // real part of the derivative at 0
    double log_det_modulus = 0;
    double phase = 0;          // argument of det_z
    double error_estimate = 0;
    std::string method;

    std::complex<double> determinant() const { return std::polar(std::exp(log_det_modulus), phase); }
};

class ZetaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// zeta(0) of |D| (squared = false) or of D^2. Zero modes are an error unless subtracted.
ZetaResult zeta0(const SpectrumFamily& spec, bool squared, bool subtract_kernel = false);

// Theta(t) = sum m e^{-t lambda^2}.
double heat_trace(const SpectrumFamily& spec, double t);

// zeta_{D^2}(0) and zeta'_{D^2}(0) from the Mellin transform of Theta split at t = 1,
// with the small-t terms c_{-1} t^{-1/2} + c_0 subtracted (one-dimensional spectral density).
ZetaResult mellin_zeta_continuation(const SpectrumFamily& spec);

// det_z D = e^{-i pi/2 (zeta_|D|(0) - eta(0))} det_z |D| for the chosen branch; squared
// gives det_z(D^2) with zero phase.
ZetaResult zeta_determinant(const SpectrumFamily& spec, bool squared = false, Branch branch = Branch::plus_i_pi);

// Z(1) = pi^{zeta/2} e^{-i pi/4 (eta - zeta)} (det |T|)^{-1/2}, zeta = dim, eta = signature.
std::complex<double> partition_function(const HermitianOperator<double>& t);

struct TraceBound {
    double supremum = 0;  // sup |g_D(t)|/sqrt(t)
    double argmax_t = 0;
    std::vector<double> t_grid;
    std::vector<double> values;
};

// g_D(t) = sum m lambda e^{-t lambda^2} over t in [1e-4, 1].
double signed_heat_trace(const SpectrumFamily& spec, double t);
TraceBound small_t_trace_bound(const SpectrumFamily& spec, int samples = 41);

}  // namespace spectral
