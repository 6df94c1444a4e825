#pragma once

#include "spectral/maslov.hpp"
#include "spectral/operator_core.hpp"
#include "spectral/spectrum.hpp"

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral {

// Spectral data of an invertible tangential operator B: positive eigenvalues
// lambda_k with multiplicities. Each copy of mode k spans {phi_k, sigma phi_k}
// with B = diag(lambda_k, -lambda_k) and sigma = [[0,-1],[1,0]] in that basis.
struct TangentialModel {
    std::vector<double> lambdas;
    std::vector<int> multiplicities;

    void validate() const;
    int modes() const { return int(lambdas.size()); }
    int multiplicity(int k) const { return multiplicities.empty() ? 1 : multiplicities[size_t(k)]; }
    int fiber_dim() const;
    double lambda_min() const;
    double lambda_max() const;
};

struct RealizedTangential {
    CMatrix<double> sigma;
    CMatrix<double> B;
};

RealizedTangential realize(const TangentialModel& model);

struct TangentialIdentities {
    double sigma_square = 0;   // |sigma^2 + I|
    double sigma_skew = 0;     // |sigma^* + sigma|
    double anticommutator = 0; // |sigma B + B sigma|
    double b_symmetry = 0;     // |B^* - B|
    double max() const;
};

TangentialIdentities tangential_identity_residuals(const RealizedTangential& r);

// One mode of sigma(d/du + B + v(u)) on [0, L]: s = f phi + g sigma phi solves
// (f, g)' = A (f, g) with A = [[-lambda, mu], [-mu, lambda]]. Boundary conditions
// are real lines (cos alpha, sin alpha): alpha = pi/2 means f = 0, alpha = 0 means g = 0.
struct Segment {
    double length = 0;
    double lambda = 0;
};

struct ModeLine {
    std::vector<Segment> segments;
    double alpha_left = 0;
    double alpha_right = 0;

    double length() const;
};

// exp(A l) for one constant segment.
Eigen::Matrix2d segment_propagator(double mu, double lambda, double length);

// Direction of exp(A l) v (forward) or exp(-A l) v (backward), normalized; never overflows.
Eigen::Vector2d propagate_direction(double mu, const Segment& seg, const Eigen::Vector2d& v, bool backward = false);

// det[w_left, w_right] with both boundary lines carried to the midpoint. Zero exactly at eigenvalues.
double secular_function(const ModeLine& line, double mu);

// Lifted Pruefer angle theta(L; mu) with theta(0) = alpha_left; theta' = -mu + lambda sin(2 theta).
double prufer_angle(const ModeLine& line, double mu);

// -(theta(L; mu) - alpha_right)/pi: an eigenvalue carries label n iff prufer_label(mu) = n.
double prufer_label(const ModeLine& line, double mu);

struct SecularOptions {
    double step_factor = 1.0 / 8.0;  // bracketing step = step_factor * pi / L
    int max_escalations = 4;
};

class RootBracketingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModeRoots {
    std::vector<double> roots;  // ascending
    std::vector<long> labels;
    double zero_label = 0;      // x0 = prufer_label(0)
    bool zero_mode = false;
    double lo = 0, hi = 0;
    double step = 0;
    int escalations = 0;
};

// All roots in [lo, hi], certified complete by the Pruefer label count.
ModeRoots mode_roots(const ModeLine& line, double lo, double hi, const SecularOptions& opt = {});

enum class EndCondition { aps_greater, aps_greater_equal, aps_less, f_zero, g_zero, line };

// Conditions are stated relative to B with u increasing left to right. At the right
// end the outward tangential operator is -B, so P_>=(-B) there is aps_less.
struct EndSpec {
    EndCondition kind = EndCondition::aps_greater;
    std::vector<double> angles;  // kind == line: per mode, cycled

    double angle(int mode) const;
    static EndSpec line_at(double alpha) { return {EndCondition::line, {alpha}}; }
};

struct ModeShift {
    double start = 0;
    double length = 0;
    std::vector<double> values;  // per mode, added to lambda_k on [start, start + length]
};

struct CylinderModel {
    TangentialModel tangential;
    double R = 1;
    EndSpec left;
    EndSpec right{EndCondition::aps_less, {}};
    std::vector<ModeShift> shifts;
    std::string name;

    // P_>= of B + (-B) on the two boundary components.
    static CylinderModel aps_both_ends(const TangentialModel& t, double R);
    void validate() const;
};

ModeLine mode_line(const CylinderModel& model, int mode);

// Default window lambda_K + 10 pi / R.
double default_window(const CylinderModel& model);

// Secular spectrum in [-window, window]. Per mode the window is widened when needed
// so the labels cover both the mu = 0 label and the reference lattice crossing.
SpectrumFamily aps_cylinder_spectrum(const CylinderModel& model, double window = 0, const SecularOptions& opt = {});

struct CircleModel {
    SpectrumFamily spectrum;
    CMatrix<double> matrix;  // -i D + a on 2K+1 Fourier collocation points
};

CircleModel circle_spectrum(double a, int K);

SpectrumFamily torus_spectrum(const TangentialModel& model, double L, int J);

// Half-infinite side: a cap line at the finite end, a B-diagonal shift on [0, width],
// and the pure cylinder beyond. extends_right: cap at u = 0 and cylinder to +infinity;
// otherwise the mirror picture with the cap at the right end.
struct DefectModel {
    TangentialModel tangential;
    std::vector<double> shifts;
    double width = 2;
    EndSpec cap = EndSpec::line_at(0.0);
    bool extends_right = true;
    bool infinite = true;
    double length = 0;  // finite selector: total length, cylinder truncated with APS there
};

struct KernelCount {
    std::vector<int> per_mode;                  // 0 or 1 per copy type
    std::vector<double> matching_determinant;   // normalized det[cap, decaying solution]
    std::vector<bool> marginal;
    int q = 0;                                  // with multiplicities
    bool any_marginal = false;
};

KernelCount defect_kernel_dimension(const DefectModel& model, double zero_tol = 1e-12, double marginal_tol = 1e-8);

// Finite truncation of a defect model: APS condition at the far end of the cylinder.
CylinderModel finite_model(const DefectModel& model);

// Two halves glued at a cut: M1 = [0, w + R] carries cap_left and a shift near u = 0,
// M2 = [w + R, 2(w + R)] carries cap_right and a shift near its far end.
struct SplitModel {
    TangentialModel tangential;
    double R = 4;
    double defect_width = 1;
    EndSpec cap_left = EndSpec::line_at(0.3);
    EndSpec cap_right = EndSpec::line_at(1.1);
    std::vector<double> shift_left;
    std::vector<double> shift_right;
    std::string name;

    double half_length() const { return defect_width + R; }
};

CylinderModel closed_model(const SplitModel& m);
CylinderModel left_half(const SplitModel& m);   // APS P_< at the cut (g = 0)
CylinderModel right_half(const SplitModel& m);  // APS P_> at the cut (f = 0)
DefectModel left_side(const SplitModel& m);
DefectModel right_side(const SplitModel& m);

// Cauchy data of one mode on [0, R] in coordinates (f(0), g(0), f(R), g(R)) with
// omega(x, y) = <sigma x_R, y_R> - <sigma x_0, y_0>. R = infinity gives the single end.
struct ModeCauchyData {
    double lambda = 0;
    int multiplicity = 1;
    SymplecticSpace<double> space;
    LagrangianFrame<double> cauchy;
    LagrangianFrame<double> positive;  // L_+ of B + (-B)
    double coefficient = 0;            // e^{-lambda R}
    double angle = 0;                  // arctan(e^{-lambda R})
    double min_angle_sine = 0;         // smallest principal angle sine vs L_+
    bool transversal = false;
};

std::vector<ModeCauchyData> cauchy_data_graph(const TangentialModel& model,
                                              double R = std::numeric_limits<double>::infinity());

struct ModeCoefficient {
    double lambda = 0;  // signed eigenvalue of B
    double a = 0;       // coefficient of e^{-lambda u} phi
};

struct DecayReport {
    double negative_norm = 0;       // sum_{lambda<0} |a|^2 (e^{2|lambda|R} - 1)/(2|lambda|)
    double negative_weighted = 0;   // sum_{lambda<0} |a|^2 e^{2|lambda|R}/|lambda|
    double positive_norm = 0;       // sum_{lambda>0} |a|^2 (1 - e^{-2 lambda R})/(2 lambda)
    double positive_weighted = 0;   // sum_{lambda>0} |a|^2 / lambda
    double l2_norm_squared = 0;
    double trace_negative_start = 0;  // |s_<^0|^2
    double trace_negative_end = 0;    // |s_<^R|^2
    double trace_positive_start = 0;  // |s_>^0|^2
    double trace_positive_end = 0;    // |s_>^R|^2
    bool finite = true;
    // The traces (s_<^0, s_>^R) are the smooth pair; (s_>^0, s_<^R) carry the H^{-1/2} part.
    std::string smooth_pair = "(s_<^0, s_>^R)";
    std::string rough_pair = "(s_>^0, s_<^R)";
};

DecayReport sobolev_decay_coefficients(const std::vector<ModeCoefficient>& coefficients, double R);

}  // namespace spectral
