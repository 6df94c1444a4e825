#pragma once

#include "spectral/dirac_models.hpp"
#include "spectral/operator_core.hpp"

#include <complex>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace spectral {

// Half-line kernels of -d^2/du^2 + lambda^2 on u >= 0 for one eigenvalue lambda of B.
// forward (D^* D): f = 0 at u = 0 if lambda >= 0, f' + lambda f = 0 if lambda < 0.
// adjoint (D D^*): f' - lambda f = 0 at u = 0 if lambda >= 0, f = 0 if lambda < 0.
enum class KernelVariant { forward, adjoint };

struct ModeHeatKernel {
    double lambda = 0;
    KernelVariant variant = KernelVariant::forward;

    bool dirichlet() const;
    // c in the boundary condition f' + c f = 0 (unused when dirichlet()).
    double robin_coefficient() const;
};

double mode_heat_kernel(const ModeHeatKernel& k, double t, double u, double v);

// Rows t,u,v,value over the tensor grid, in the order given.
void write_kernel_csv(std::ostream& os, const ModeHeatKernel& k, const std::vector<double>& ts,
                      const std::vector<double>& us, const std::vector<double>& vs);

class HeatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Signed spectrum of the boundary operator with multiplicities. m0 = dim Ker, kept at 0.
struct EtaDensity {
    std::vector<double> spectrum;
    std::vector<int> multiplicities;
    int m0 = 0;

    static EtaDensity from_tangential(const TangentialModel& t);
    static EtaDensity explicit_spectrum(std::vector<double> values, std::vector<int> multiplicities = {});
    int multiplicity(size_t i) const { return multiplicities.empty() ? 1 : multiplicities[i]; }
    void validate() const;
};

// sum m sign(lambda) d/du (1/2 e^{2|lambda|u} erfc(u/sqrt(t) + |lambda| sqrt(t))), sign(0) = +1.
double eta_density(const EtaDensity& model, double t, double u);

// -m0/2 - sum m sign(lambda)/2 erfc(|lambda| sqrt(t)).
double eta_trace(const EtaDensity& model, double t);

// Integral of eta_density over [0, upper] by adaptive quadrature.
double eta_density_integral(const EtaDensity& model, double t, double upper = 40.0);

struct MellinCheck {
    double s = 0;
    double lhs = 0;   // f1 + f_inf
    double rhs = 0;   // -Gamma(s + 1/2)/(2 s sqrt(pi)) eta(2s)
    double gap = 0;
    double f1 = 0;    // int_0^1 (K(t) + m0/2 - a0) t^{s-1} dt + a0/s
    double f_inf = 0; // int_1^inf (K(t) + m0/2) t^{s-1} dt
    double a0 = 0;    // lim_{t->0} K(t) + m0/2
    double quadrature_error = 0;
};

MellinCheck mellin_eta_identity_check(const EtaDensity& model, double s);

struct ProductIndex {
    int index = 0;             // -eta(0)/2 rounded
    double eta_boundary = 0;   // eta of B + (-B)
    double residual = 0;       // distance of -eta/2 from the integer
    int kernel = 0;            // direct mode count
    int cokernel = 0;
    int mode_count_index = 0;
};

// Cylinder [0, R] x Sigma with P_>= of B + (-B) on both ends and zero interior density.
ProductIndex aps_index_product_model(const CylinderModel& model);
// Same with an explicit (possibly asymmetric) invertible spectrum for B.
ProductIndex aps_index_product_model(const EtaDensity& b, double R);

struct PastingCheck {
    int lhs = 0;  // i(P2, I - P1)
    int rhs = 0;  // index of d/dt + B on [0, 1] with P1 f(0) = 0, P2 f(1) = 0
    int kernel = 0;
    int cokernel = 0;
};

// Projections are diagonal in the eigenbasis of B, listed by spectrum.
PastingCheck index_pasting_check(const CMatrix<double>& p1, const CMatrix<double>& p2, const EtaDensity& model);

// Kernel of d/dt - d^2/dx^2 + a^2 x^2 on the line.
double mehler_kernel(double a, double x, double y, double t);

}  // namespace spectral
