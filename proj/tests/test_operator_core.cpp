#include "spectral/io.hpp"
#include "spectral/operator_core.hpp"

#include <doctest.h>

#include <random>

using namespace spectral;
using C = Complex<double>;

namespace {

CMatrix<double> random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0)
{
    std::normal_distribution<double> g;
    CMatrix<double> a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = C(g(rng), g(rng));
    return scale * (a + a.adjoint()) / 2.0;
}

CMatrix<double> random_unitary(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> g;
    CMatrix<double> a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = C(g(rng), g(rng));
    Eigen::HouseholderQR<CMatrix<double>> qr(a);
    return qr.householderQ();
}

CMatrix<double> random_map(std::mt19937_64& rng, int rows, int cols, int rank)
{
    // chosen SVD factors: U diag(s) V* with exactly `rank` nonzero singular values
    const CMatrix<double> u = random_unitary(rng, rows);
    const CMatrix<double> v = random_unitary(rng, cols);
    CMatrix<double> s = CMatrix<double>::Zero(rows, cols);
    for (int k = 0; k < rank; ++k) s(k, k) = 1.0 + k;
    return u * s * v.adjoint();
}

CMatrix<double> proj_onto(const CMatrix<double>& spanning)
{
    Eigen::HouseholderQR<CMatrix<double>> qr(spanning);
    const CMatrix<double> q = CMatrix<double>(qr.householderQ()).leftCols(spanning.cols());
    return q * q.adjoint();
}

}  // namespace

TEST_CASE("spectral_resolution basics")
{
    const auto z = spectral_resolution(HermitianOperator<double>(CMatrix<double>::Zero(3, 3)));
    CHECK(z.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
    CHECK((z.eigenvectors.adjoint() * z.eigenvectors - CMatrix<double>::Identity(3, 3)).norm() < 1e-14);

    Eigen::VectorXd d(2);
    d << 1, -1;
    const auto r = spectral_resolution(HermitianOperator<double>::diagonal(d));
    CHECK(r.eigenvalues(0) == doctest::Approx(-1));
    CHECK(r.eigenvalues(1) == doctest::Approx(1));

    std::mt19937_64 rng(11);
    const HermitianOperator<double> h(random_hermitian(rng, 8));
    const auto rr = spectral_resolution(h);
    CHECK(resolution_residual(h, rr) <= 1e-12);
    for (Eigen::Index k = 1; k < rr.eigenvalues.size(); ++k) CHECK(rr.eigenvalues(k) >= rr.eigenvalues(k - 1));
}

TEST_CASE("non-hermitian input is rejected")
{
    CMatrix<double> a(2, 2);
    a << C(0), C(1), C(0), C(0);
    CHECK_THROWS_AS(HermitianOperator<double>{a}, OperatorError);
}

TEST_CASE("cayley examples and properties")
{
    const auto c0 = cayley(HermitianOperator<double>(CMatrix<double>::Zero(4, 4)));
    CHECK((c0.matrix() + CMatrix<double>::Identity(4, 4)).norm() < 1e-14);
    Eigen::VectorXd d(2);
    d << 1, -1;
    const auto c = cayley(HermitianOperator<double>::diagonal(d));
    CHECK(std::abs(c.matrix()(0, 0) - C(0, -1)) < 1e-14);
    CHECK(std::abs(c.matrix()(1, 1) - C(0, 1)) < 1e-14);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator<double> h(random_hermitian(rng, 6, 1.0 + trial));
        const auto u = cayley(h);
        CHECK((u.matrix() * u.matrix().adjoint() - CMatrix<double>::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-12);
        // eigenvalue map after diagonalization
        const auto r = spectral_resolution(h);
        const CMatrix<double> diag = r.eigenvectors.adjoint() * u.matrix() * r.eigenvectors;
        for (Eigen::Index k = 0; k < 6; ++k) {
            const double l = r.eigenvalues(k);
            CHECK(std::abs(diag(k, k) - (C(l, -1) / C(l, 1))) <= 1e-12);
        }
        // conjugation covariance
        const CMatrix<double> w = random_unitary(rng, 6);
        const HermitianOperator<double> hw(w.adjoint() * h.matrix() * w);
        CHECK((cayley(hw).matrix() - w.adjoint() * u.matrix() * w).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((riesz(hw).matrix() - w.adjoint() * riesz(h).matrix() * w).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("riesz examples")
{
    Eigen::VectorXd d(3);
    d << 0, 1, -1;
    const auto r = riesz(HermitianOperator<double>::diagonal(d)).matrix();
    CHECK(std::abs(r(0, 0)) < 1e-15);
    CHECK(r(1, 1).real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(r(2, 2).real() == doctest::Approx(-1 / std::sqrt(2.0)));
    CHECK(riesz(HermitianOperator<double>(CMatrix<double>::Zero(2, 2))).matrix().norm() == 0.0);
    for (int n = 1; n <= 10; ++n) {
        const auto [m, t] = fuglede_pair<double>(n, 12);
        CHECK(std::abs(operator_norm<double>(riesz(t).matrix() - riesz(m).matrix()) - 2.0 * n / std::sqrt(1.0 + n * n)) <=
              1e-12);
    }
}

TEST_CASE("gap distance")
{
    std::mt19937_64 rng(5);
    const HermitianOperator<double> h(random_hermitian(rng, 5));
    CHECK(gap_distance(h, h) == 0.0);
    for (int n = 1; n <= 10; ++n) {
        const auto [m, t] = fuglede_pair<double>(n, 10);
        CHECK(std::abs(gap_distance(m, t) - 2.0 * n / (n * n + 1.0)) <= 1e-12);
    }
    // dense norm oracle: largest singular value of the resolvent difference via the Gram matrix
    const HermitianOperator<double> a(random_hermitian(rng, 6)), b(random_hermitian(rng, 6));
    const CMatrix<double> id = CMatrix<double>::Identity(6, 6);
    const CMatrix<double> diff =
        (a.matrix() + C(0, 1) * id).inverse() - (b.matrix() + C(0, 1) * id).inverse();
    const double oracle = std::sqrt(Eigen::SelfAdjointEigenSolver<CMatrix<double>>(diff.adjoint() * diff).eigenvalues().maxCoeff());
    CHECK(gap_distance(a, b) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(gap_distance(a, b) == doctest::Approx(gap_distance(b, a)).epsilon(1e-14));
    CHECK_THROWS_AS(gap_distance(a, HermitianOperator<double>(random_hermitian(rng, 3))), std::exception);
}

TEST_CASE("graph projection")
{
    const auto p0 = graph_projection(HermitianOperator<double>(CMatrix<double>::Zero(2, 2))).matrix();
    CMatrix<double> e0 = CMatrix<double>::Zero(4, 4);
    e0.topLeftCorner(2, 2).setIdentity();
    CHECK((p0 - e0).norm() < 1e-14);
    CMatrix<double> one(1, 1);
    one(0, 0) = 1;
    const auto p1 = graph_projection(HermitianOperator<double>(one)).matrix();
    CHECK((p1 - CMatrix<double>::Constant(2, 2, C(0.5))).norm() < 1e-14);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        std::normal_distribution<double> g;
        CMatrix<double> t(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) t(i, j) = C(g(rng), g(rng));
        const CMatrix<double> p = graph_projection<double>(t);
        CHECK((p * p - p).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(max_asymmetry<double>(p) <= 1e-10);
        const auto forms = graph_projection_forms<double>(t);
        CHECK((forms[0] - forms[1]).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((forms[0] - forms[2]).cwiseAbs().maxCoeff() <= 1e-10);
        // span oracle: P fixes every (x, T x) and has rank 4
        CMatrix<double> graph(8, 4);
        graph << CMatrix<double>::Identity(4, 4), t;
        CHECK((p * graph - graph).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(std::abs(p.trace().real() - 4.0) <= 1e-10);
    }
}

TEST_CASE("finite index")
{
    CHECK(finite_index<double>({CMatrix<double>::Identity(4, 4)}).index == 0);
    std::mt19937_64 rng(2);
    const auto f32 = finite_index<double>({random_map(rng, 3, 2, 2)});
    CHECK(f32.index == -1);
    const CMatrix<double> f = random_map(rng, 2, 3, 2);  // index 1
    const CMatrix<double> g = random_map(rng, 4, 2, 2);  // index -2
    CHECK(finite_index<double>({f}).index == 1);
    CHECK(finite_index<double>({g}).index == -2);
    CHECK(finite_index<double>({g * f}).index == -1);
    const auto r = finite_index<double>({random_map(rng, 5, 7, 4)});
    CHECK(r.kernel == 3);
    CHECK(r.cokernel == 1);
    CHECK(r.index == 2);
    CHECK_FALSE(r.unstable);

    // a singular value at the cutoff is flagged
    CMatrix<double> near = CMatrix<double>::Zero(2, 2);
    near(0, 0) = 1;
    near(1, 1) = 1e-9;
    CHECK(finite_index<double>({near}).unstable);
}

TEST_CASE("index of compositions is additive on rank-stable random maps")
{
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 30; ++trial) {
        const int a = 2 + int(rng() % 5), b = 2 + int(rng() % 5), c = 2 + int(rng() % 5);
        // full-rank maps keep the composition generic
        const CMatrix<double> f = random_map(rng, b, a, std::min(a, b));
        const CMatrix<double> g = random_map(rng, c, b, std::min(b, c));
        const auto rf = finite_index<double>({f}), rg = finite_index<double>({g}), rgf = finite_index<double>({g * f});
        if (rf.unstable || rg.unstable || rgf.unstable) continue;
        CHECK(rgf.index == rf.index + rg.index);
    }
}

TEST_CASE("virtual codimension")
{
    CMatrix<double> e12 = CMatrix<double>::Zero(3, 2);
    e12(0, 0) = 1;
    e12(1, 1) = 1;
    const CMatrix<double> p1 = proj_onto(e12);
    const CMatrix<double> p2 = proj_onto(e12.leftCols(1));
    CHECK(virtual_codimension<double>(p1, p1) == 0);
    CHECK(virtual_codimension<double>(p2, p1) == 1);
    CHECK(virtual_codimension<double>(p1, p2) == -1);
    CHECK_THROWS_AS(virtual_codimension<double>(p1, CMatrix<double>::Constant(3, 3, C(2))), OperatorError);

    // additivity i(P3,P1) = i(P3,P2) + i(P2,P1) on nested coordinate projections
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 6;
        std::vector<int> dims{int(rng() % (n + 1)), int(rng() % (n + 1)), int(rng() % (n + 1))};
        const CMatrix<double> w = random_unitary(rng, n);
        std::vector<CMatrix<double>> p;
        for (int d : dims) p.push_back(d == 0 ? CMatrix<double>(CMatrix<double>::Zero(n, n)) : proj_onto(w.leftCols(d)));
        CHECK(virtual_codimension<double>(p[2], p[0]) ==
              virtual_codimension<double>(p[2], p[1]) + virtual_codimension<double>(p[1], p[0]));
    }
}

TEST_CASE("riesz Lipschitz ratio")
{
    CMatrix<double> one(1, 1);
    one(0, 0) = 1;
    const HermitianOperator<double> zero1(CMatrix<double>::Zero(1, 1));
    CHECK(riesz_lipschitz_ratio(zero1, HermitianOperator<double>(one)) == doctest::Approx(1 / std::sqrt(2.0)));
    // derivative of x (1 + x^2)^{-1/2} at 0 is 1
    const HermitianOperator<double> tiny(one * 1e-7);
    CHECK(riesz_lipschitz_ratio(zero1, tiny) == doctest::Approx(1.0).epsilon(1e-9));

    std::mt19937_64 rng(6);
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const HermitianOperator<double> s(random_hermitian(rng, 5, 20.0 * std::ldexp(1.0, -int(rng() % 5))));
        const HermitianOperator<double> c(random_hermitian(rng, 5, 0.5));
        if (operator_norm<double>(s.matrix()) > 100) continue;
        worst = std::max(worst, riesz_lipschitz_ratio(s, c));
    }
    MESSAGE("empirical sup of the Riesz Lipschitz ratio: " << worst);
    CHECK(worst < 10);
}

TEST_CASE("gap and graph-projection distances are uniformly equivalent on samples")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        const HermitianOperator<double> s(random_hermitian(rng, 4, 3.0));
        const HermitianOperator<double> t(random_hermitian(rng, 4, 3.0));
        const double g = gap_distance(s, t);
        const double d = operator_norm<double>(graph_projection(s).matrix() - graph_projection(t).matrix());
        CHECK(g <= 10 * d);
        CHECK(d <= 10 * g);
    }
}

TEST_CASE("operator JSON round trip")
{
    std::mt19937_64 rng(21);
    const HermitianOperator<double> h(random_hermitian(rng, 3));
    const auto j = to_json(h);
    CHECK(j["dim"] == 3);
    CHECK(j["entries"].size() == 9);
    CHECK((hermitian_from_json<double>(j).matrix() - h.matrix()).cwiseAbs().maxCoeff() == 0.0);
    const UnitaryOperator<double> u(random_unitary(rng, 3));
    CHECK((unitary_from_json<double>(to_json(u)).matrix() - u.matrix()).cwiseAbs().maxCoeff() == 0.0);
    nlohmann::json bad = {{"dim", 2}, {"entries", {{1, 0}}}};
    CHECK_THROWS_AS(matrix_from_json<double>(bad), OperatorError);
}
