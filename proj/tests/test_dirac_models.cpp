#include "spectral/dirac_models.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <numbers>
#include <random>

using namespace spectral;
using std::numbers::pi;

namespace {

TangentialModel two_modes() { return {{1.0, 2.0}, {1, 2}}; }

// Secular determinant by RK4 shooting of (f, g)' = [[-lambda, mu], [-mu, lambda]] (f, g).
double shooting_determinant(const ModeLine& line, double mu, int steps_per_unit = 400)
{
    Eigen::Vector2d y(std::cos(line.alpha_left), std::sin(line.alpha_left));
    for (const auto& seg : line.segments) {
        const int n = std::max(8, int(std::ceil(seg.length * steps_per_unit)));
        const double h = seg.length / n;
        Eigen::Matrix2d a;
        a << -seg.lambda, mu, -mu, seg.lambda;
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector2d k1 = a * y, k2 = a * (y + h / 2 * k1), k3 = a * (y + h / 2 * k2), k4 = a * (y + h * k3);
            y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        y.normalize();
    }
    return y(0) * std::sin(line.alpha_right) - y(1) * std::cos(line.alpha_right);
}

// Roots of the shooting determinant in [lo, hi] by sign changes on a fine grid.
std::vector<double> shooting_roots(const ModeLine& line, double lo, double hi, double step = 1e-3)
{
    std::vector<double> out;
    double a = lo, fa = shooting_determinant(line, a);
    for (double b = lo + step; b <= hi + 1e-12; b += step) {
        const double fb = shooting_determinant(line, b);
        if (fa == 0) out.push_back(a);
        else if (fa * fb < 0) {
            std::uintmax_t it = 60;
            const auto r = boost::math::tools::toms748_solve([&](double m) { return shooting_determinant(line, m); }, a,
                                                             b, fa, fb, boost::math::tools::eps_tolerance<double>(40), it);
            out.push_back(0.5 * (r.first + r.second));
        }
        a = b;
        fa = fb;
    }
    return out;
}

std::vector<double> mode_values(const SpectrumFamily& f, int mode, double lo, double hi)
{
    std::vector<double> v;
    for (size_t i = 0; i < f.values.size(); ++i)
        if (f.modes[i] == mode && f.values[i] >= lo && f.values[i] <= hi) v.push_back(f.values[i]);
    return v;
}

// -f'' + lambda^2 f = nu f, f(0) = 0, f'(L) + lambda f(L) = 0; second-order FD, ghost point at L.
std::vector<double> fd_squared_eigenvalues(double lambda, double L, int N)
{
    const double h = L / N;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        m(i, i) = 2 / (h * h) + lambda * lambda;
        if (i > 0) m(i, i - 1) = -1 / (h * h);
        if (i + 1 < N) m(i, i + 1) = -1 / (h * h);
    }
    // ghost f_{N+1} = f_{N-1} - 2 h lambda f_N
    m(N - 1, N - 2) = -2 / (h * h);
    m(N - 1, N - 1) += 2 * lambda / h;
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<double> v;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) v.push_back(es.eigenvalues()(k).real());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("realized tangential operator satisfies the Clifford identities")
{
    const auto t = two_modes();
    CHECK(t.fiber_dim() == 6);
    CHECK(t.lambda_min() == 1.0);
    CHECK(t.lambda_max() == 2.0);
    const auto r = realize(t);
    const auto id = tangential_identity_residuals(r);
    CHECK(id.max() == 0.0);
    CHECK((r.sigma * r.sigma + CMatrix<double>::Identity(6, 6)).norm() == 0.0);
    CHECK((r.sigma * r.B + r.B * r.sigma).norm() == 0.0);

    CHECK_THROWS_AS((TangentialModel{{0.0}, {}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((TangentialModel{{2.0, 1.0}, {}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((TangentialModel{{1.0}, {1, 1}}.validate()), std::invalid_argument);
}

TEST_CASE("segment propagator is the matrix exponential")
{
    for (double mu : {-2.0, 0.0, 0.7, 3.5})
        for (double lam : {0.5, 2.0})
            for (double len : {0.1, 1.0, 3.0}) {
                Eigen::Matrix2d a;
                a << -lam, mu, -mu, lam;
                const Eigen::Matrix2d e = (a * len).exp();
                CHECK((segment_propagator(mu, lam, len) - e).cwiseAbs().maxCoeff() <= 1e-10 * e.norm());
            }
}

TEST_CASE("circle collocation matrix has spectrum k + a")
{
    for (double a : {0.0, 0.25, -0.4}) {
        const auto c = circle_spectrum(a, 6);
        REQUIRE(c.spectrum.values.size() == 13);
        Eigen::SelfAdjointEigenSolver<CMatrix<double>> es(c.matrix);
        for (int k = 0; k < 13; ++k) CHECK(es.eigenvalues()(k) == doctest::Approx(c.spectrum.values[size_t(k)]).epsilon(1e-10));
        CHECK(c.spectrum.values.front() == doctest::Approx(-6 + a));
    }
}

TEST_CASE("torus spectrum")
{
    const auto t = two_modes();
    const auto f = torus_spectrum(t, 8.0, 5);
    CHECK(f.symmetric);
    CHECK(negation_closed(f.values, f.multiplicities));
    // (2J+1) frequencies, two signs, total fiber multiplicity 3
    CHECK(f.total_multiplicity() == 11 * 2 * 3);
    double smallest = 1e9;
    for (double v : f.values) smallest = std::min(smallest, std::abs(v));
    CHECK(smallest == doctest::Approx(1.0));
    CHECK(std::count(f.values.begin(), f.values.end(), std::sqrt(4.0 + std::pow(2 * pi * 3 / 8.0, 2))) == 1);
}

TEST_CASE("pure APS cylinder: roots match a finite-difference oracle")
{
    for (double R : {2.0, 5.0}) {
        const TangentialModel t{{1.0}, {}};
        const auto f = aps_cylinder_spectrum(CylinderModel::aps_both_ends(t, R));
        CHECK(f.symmetric);
        std::vector<double> pos;
        for (double v : f.values)
            if (v > 0) pos.push_back(v);
        // Richardson on O(h^2) eigenvalues of the squared problem
        const auto coarse = fd_squared_eigenvalues(1.0, R, 800);
        const auto fine = fd_squared_eigenvalues(1.0, R, 1600);
        for (size_t k = 0; k < 4; ++k) {
            const double nu = (4 * fine[k] - coarse[k]) / 3;
            CHECK(pos[k] == doctest::Approx(std::sqrt(nu)).epsilon(1e-6));
        }
    }
}

TEST_CASE("pure APS cylinder has no spectrum in (-lambda_1, lambda_1)")
{
    for (double R : {0.5, 1.0, 4.0, 16.0}) {
        const auto f = aps_cylinder_spectrum(CylinderModel::aps_both_ends(two_modes(), R));
        for (double v : f.values) CHECK(std::abs(v) > 1.0);
        CHECK(f.zero_count(1e-12) == 0);
    }
}

TEST_CASE("secular roots agree with an RK4 shooting oracle on shifted lines")
{
    CylinderModel m;
    m.tangential = two_modes();
    m.R = 3.0;
    m.left = EndSpec::line_at(0.3);
    m.right = EndSpec::line_at(1.1);
    m.shifts.push_back({0.0, 1.0, {0.5, 0.0}});
    m.shifts.push_back({2.0, 1.0, {-0.7, 0.0}});
    const auto f = aps_cylinder_spectrum(m, 5.0);
    for (int k = 0; k < 2; ++k) {
        const auto line = mode_line(m, k);
        const auto oracle = shooting_roots(line, -5, 5);
        const auto got = mode_values(f, k, -5, 5);
        REQUIRE(oracle.size() == got.size());
        for (size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(oracle[i]).epsilon(1e-8));
            CHECK(std::abs(secular_function(line, got[i])) <= 1e-9);
        }
    }
}

TEST_CASE("Pruefer labels are consecutive integers at roots")
{
    const auto line = mode_line(CylinderModel::aps_both_ends(two_modes(), 3.0), 1);
    const auto r = mode_roots(line, -8, 8);
    REQUIRE(r.roots.size() >= 2);
    for (size_t i = 0; i < r.roots.size(); ++i) {
        CHECK(prufer_label(line, r.roots[i]) == doctest::Approx(double(r.labels[i])).epsilon(1e-8));
        if (i > 0) CHECK(r.labels[i] == r.labels[i - 1] + 1);
    }
}

TEST_CASE("defect kernel: q is fixed by the cap angle, never by the well")
{
    DefectModel d;
    d.tangential = two_modes();
    d.width = 1;
    for (auto shifts : std::vector<std::vector<double>>{{}, {0.5, 0}, {-3.0, -5.0}}) {
        d.shifts = shifts;
        d.cap = EndSpec::line_at(0.0);
        d.extends_right = true;
        CHECK(defect_kernel_dimension(d).q == 3);
        d.cap = EndSpec::line_at(0.3);
        CHECK(defect_kernel_dimension(d).q == 0);
        d.cap = {EndCondition::line, {0.0, 0.4}};
        CHECK(defect_kernel_dimension(d).q == 1);
        d.extends_right = false;
        d.cap = EndSpec::line_at(pi / 2);
        CHECK(defect_kernel_dimension(d).q == 3);
        d.cap = EndSpec::line_at(0.0);
        CHECK(defect_kernel_dimension(d).q == 0);
    }
}

TEST_CASE("defect kernel count matches exponentially small eigenvalues of truncations")
{
    DefectModel d;
    d.tangential = two_modes();
    d.width = 1;
    d.shifts = {0.5, 0.0};
    for (auto cap : std::vector<std::vector<double>>{{0.0, 0.4}, {0.3}, {0.0}}) {
        d.cap = {EndCondition::line, cap};
        d.length = 9;
        const int q = defect_kernel_dimension(d).q;
        const auto f = aps_cylinder_spectrum(finite_model(d));
        int small = 0;
        for (size_t i = 0; i < f.values.size(); ++i) small += std::abs(f.values[i]) < 1e-3 ? f.multiplicities[i] : 0;
        CHECK(small == q);
    }
}

TEST_CASE("Cauchy data of a finite cylinder by ODE shooting")
{
    const auto t = two_modes();
    const double R = 1.5;
    const auto data = cauchy_data_graph(t, R);
    REQUIRE(data.size() == 2);
    for (const auto& d : data) {
        CHECK(is_lagrangian(d.space, d.cauchy).lagrangian);
        CHECK(is_lagrangian(d.space, d.positive).lagrangian);
        CHECK(d.transversal);
        CHECK(d.coefficient == doctest::Approx(std::exp(-d.lambda * R)));
        CHECK(d.angle == doctest::Approx(std::atan(d.coefficient)));
        // kernel solutions at mu = 0 from RK4, boundary values (f(0), g(0), f(R), g(R))
        ModeLine line{{{R, d.lambda}}, 0, 0};
        RMatrix<double> shot(4, 2);
        for (int c = 0; c < 2; ++c) {
            Eigen::Vector2d y = c == 0 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
            shot.col(c).head(2) = y;
            const int n = 4000;
            const double h = R / n;
            for (int i = 0; i < n; ++i) {
                auto rhs = [&](const Eigen::Vector2d& z) { return Eigen::Vector2d(-d.lambda * z(0), d.lambda * z(1)); };
                const Eigen::Vector2d k1 = rhs(y), k2 = rhs(y + h / 2 * k1), k3 = rhs(y + h / 2 * k2), k4 = rhs(y + h * k3);
                y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            }
            shot.col(c).tail(2) = y;
        }
        CHECK(principal_angle_sines<double>(d.cauchy.frame, orthonormal_basis<double>(shot)).maxCoeff() <= 1e-10);
    }
    const auto half = cauchy_data_graph(t);
    CHECK(half[0].cauchy.frame.rows() == 2);
    CHECK(is_lagrangian(half[0].space, half[0].cauchy).lagrangian);
    CHECK_THROWS_AS(cauchy_data_graph(t, -1.0), std::invalid_argument);
}

TEST_CASE("decay report against quadrature")
{
    const std::vector<ModeCoefficient> cs{{1.0, 0.3}, {-2.0, 0.1}, {0.5, -0.2}};
    const double R = 1.2;
    const auto r = sobolev_decay_coefficients(cs, R);
    double l2 = 0;
    for (const auto& c : cs)
        l2 += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double u) { return c.a * c.a * std::exp(-2 * c.lambda * u); }, 0, R);
    CHECK(r.l2_norm_squared == doctest::Approx(l2).epsilon(1e-12));
    CHECK(r.finite);
    CHECK(r.trace_negative_end == doctest::Approx(0.01 * std::exp(4 * R)));
    CHECK(r.trace_positive_start == doctest::Approx(0.09 + 0.04));
    CHECK_THROWS_AS(sobolev_decay_coefficients({{0.0, 1.0}}, R), std::invalid_argument);
}

TEST_CASE("invalid models are rejected")
{
    auto m = CylinderModel::aps_both_ends(two_modes(), 2.0);
    m.shifts.push_back({1.5, 1.0, {0.2}});
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.shifts.clear();
    m.R = -1;
    CHECK_THROWS_AS(aps_cylinder_spectrum(m), std::invalid_argument);
    const EndSpec empty{EndCondition::line, {}};
    CHECK_THROWS_AS(empty.angle(0), std::invalid_argument);
}
