#pragma once

#include "spectral/operator_core.hpp"
#include "spectral/spectral_flow.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace spectral {

template <typename S>
struct SymplecticSpace {
    RMatrix<S> J;

    Eigen::Index real_dim() const { return J.rows(); }
    Eigen::Index n() const { return J.rows() / 2; }

    // J e_k = e_{n+k}, J e_{n+k} = -e_k.
    static SymplecticSpace standard(Eigen::Index n)
    {
        RMatrix<S> j = RMatrix<S>::Zero(2 * n, 2 * n);
        j.topRightCorner(n, n) = -RMatrix<S>::Identity(n, n);
        j.bottomLeftCorner(n, n) = RMatrix<S>::Identity(n, n);
        return {j};
    }

    S omega(const RVector<S>& x, const RVector<S>& y) const { return (J * x).dot(y); }

    S structure_residual() const
    {
        const Eigen::Index d = J.rows();
        const RMatrix<S> id = RMatrix<S>::Identity(d, d);
        return std::max({(J.transpose() + J).cwiseAbs().maxCoeff(), (J * J + id).cwiseAbs().maxCoeff(),
                         (J.transpose() * J - id).cwiseAbs().maxCoeff()});
    }
};

// Realification of C^m with coordinates (Re z_0, Im z_0, Re z_1, Im z_1, ...).
template <typename S>
RVector<S> realify(const CVector<S>& z)
{
    RVector<S> x(2 * z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        x(2 * k) = z(k).real();
        x(2 * k + 1) = z(k).imag();
    }
    return x;
}

// Real matrix of the complex-linear map diag(signs_k * i).
template <typename S>
RMatrix<S> realified_diagonal_i(const std::vector<int>& signs)
{
    const Eigen::Index m = Eigen::Index(signs.size());
    RMatrix<S> j = RMatrix<S>::Zero(2 * m, 2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
        j(2 * k + 1, 2 * k) = S(signs[size_t(k)]);
        j(2 * k, 2 * k + 1) = -S(signs[size_t(k)]);
    }
    return j;
}

template <typename S>
RMatrix<S> orthonormal_basis(const RMatrix<S>& spanning, S rank_tol = S(1e-10))
{
    Eigen::JacobiSVD<RMatrix<S>> svd(spanning, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > rank_tol * std::max(S(1), sv(0))) ++r;
    return svd.matrixU().leftCols(r);
}

template <typename S>
struct LagrangianFrame {
    RMatrix<S> frame;  // 2n x n, orthonormal columns

    static LagrangianFrame from_span(const RMatrix<S>& spanning) { return {orthonormal_basis<S>(spanning)}; }
};

template <typename S>
struct LagrangianCheck {
    bool lagrangian = false;
    S omega_residual = 0;
    S orthonormality_residual = 0;
    Eigen::Index dimension = 0;
};

template <typename S>
LagrangianCheck<S> is_lagrangian(const SymplecticSpace<S>& space, const LagrangianFrame<S>& l, S tol = S(1e-10))
{
    LagrangianCheck<S> c;
    const RMatrix<S>& f = l.frame;
    c.dimension = f.cols();
    if (f.rows() != space.real_dim() || f.cols() == 0) return c;
    c.omega_residual = (f.transpose() * space.J.transpose() * f).cwiseAbs().maxCoeff();
    c.orthonormality_residual =
        (f.transpose() * f - RMatrix<S>::Identity(f.cols(), f.cols())).cwiseAbs().maxCoeff();
    c.lagrangian = c.dimension == space.n() && c.omega_residual <= tol && c.orthonormality_residual <= tol;
    return c;
}

template <typename S>
LagrangianFrame<S> orthogonal_complement_lagrangian(const SymplecticSpace<S>& space, const LagrangianFrame<S>& l)
{
    return {space.J * l.frame};
}

// Unitary U (in the J-complex structure fixed by lambda0) with mu = U(lambda0^perp).
// Coordinates: x = E a + J E b  <->  a + i b, where E spans lambda0^perp = J lambda0.
template <typename S>
CMatrix<S> generating_unitary(const SymplecticSpace<S>& space, const LagrangianFrame<S>& mu,
                              const LagrangianFrame<S>& lambda0)
{
    const RMatrix<S> e = space.J * lambda0.frame;
    const RMatrix<S> je = space.J * e;
    const RMatrix<S> re = e.transpose() * mu.frame;
    const RMatrix<S> im = je.transpose() * mu.frame;
    CMatrix<S> u(re.rows(), re.cols());
    for (Eigen::Index i = 0; i < re.rows(); ++i)
        for (Eigen::Index j = 0; j < re.cols(); ++j) u(i, j) = Complex<S>(re(i, j), im(i, j));
    return u;
}

// W = U (transpose U), the lift-invariant product: U -> U O leaves it unchanged.
template <typename S>
UnitaryOperator<S> complex_generator(const SymplecticSpace<S>& space, const LagrangianFrame<S>& mu,
                                     const LagrangianFrame<S>& lambda0)
{
    if (!is_lagrangian(space, mu).lagrangian || !is_lagrangian(space, lambda0).lagrangian)
        throw OperatorError("complex_generator: frame is not Lagrangian");
    const CMatrix<S> u = generating_unitary(space, mu, lambda0);
    return UnitaryOperator<S>(u * u.transpose(), S(1e-9));
}

// Sines of the principal angles between two subspaces given by orthonormal frames.
template <typename S>
RVector<S> principal_angle_sines(const RMatrix<S>& f1, const RMatrix<S>& f2)
{
    const RMatrix<S> resid = f2 - f1 * (f1.transpose() * f2);
    Eigen::JacobiSVD<RMatrix<S>> svd(resid);
    RVector<S> s = svd.singularValues();
    std::sort(s.data(), s.data() + s.size());
    return s;
}

template <typename S>
int intersection_dimension(const LagrangianFrame<S>& l1, const LagrangianFrame<S>& l2, S angle_tol = S(1e-8))
{
    const RVector<S> s = principal_angle_sines<S>(l1.frame, l2.frame);
    int k = 0;
    for (Eigen::Index j = 0; j < s.size(); ++j)
        if (s(j) < std::sin(angle_tol)) ++k;
    return k;
}

template <typename S>
struct PairIndex {
    int intersection = 0;
    int codim_sum = 0;
    int index = 0;
    S min_nonzero_angle_sine = 1;
};

template <typename S>
PairIndex<S> fredholm_pair_index(const SymplecticSpace<S>& space, const LagrangianFrame<S>& l1,
                                 const LagrangianFrame<S>& l2, S angle_tol = S(1e-8))
{
    PairIndex<S> p;
    const RVector<S> s = principal_angle_sines<S>(l1.frame, l2.frame);
    for (Eigen::Index j = 0; j < s.size(); ++j) {
        if (s(j) < std::sin(angle_tol))
            ++p.intersection;
        else
            p.min_nonzero_angle_sine = std::min(p.min_nonzero_angle_sine, s(j));
    }
    const int dim_sum = int(l1.frame.cols() + l2.frame.cols()) - p.intersection;
    p.codim_sum = int(space.real_dim()) - dim_sum;
    p.index = p.intersection - p.codim_sum;
    return p;
}

template <typename S>
struct LagrangianPath {
    std::vector<S> grid;
    std::vector<LagrangianFrame<S>> frames;
    std::function<LagrangianFrame<S>(S)> family;
};

template <typename S>
LagrangianPath<S> sample_lagrangian_path(const std::function<LagrangianFrame<S>(S)>& f, S t0, S t1, int samples)
{
    LagrangianPath<S> p;
    p.family = f;
    for (int j = 0; j < samples; ++j) {
        const S t = (j + 1 == samples) ? t1 : t0 + (t1 - t0) * S(j) / S(samples - 1);
        p.grid.push_back(t);
        p.frames.push_back(f(t));
    }
    return p;
}

template <typename S>
UnitaryPath<S> generator_path(const SymplecticSpace<S>& space, const LagrangianPath<S>& path,
                              const LagrangianFrame<S>& lambda0)
{
    UnitaryPath<S> u;
    u.grid = path.grid;
    for (const auto& f : path.frames) u.unitaries.push_back(complex_generator(space, f, lambda0));
    if (path.family) {
        auto fam = path.family;
        u.family = [space, fam, lambda0](S t) { return complex_generator(space, fam(t), lambda0); };
    }
    return u;
}

template <typename S>
CrossingLedger<S> maslov_ledger(const SymplecticSpace<S>& space, const LagrangianPath<S>& path,
                                const LagrangianFrame<S>& lambda0, const WindingOptions& opt = {})
{
    return winding_through_minus_one(generator_path(space, path, lambda0), opt);
}

// Real (realified) Maslov index: counts real intersection dimensions.
template <typename S>
int maslov_index(const SymplecticSpace<S>& space, const LagrangianPath<S>& path, const LagrangianFrame<S>& lambda0,
                 const WindingOptions& opt = {})
{
    return maslov_ledger(space, path, lambda0, opt).winding;
}

// Complex symplectic picture: Lagrangians are graphs of unitaries U_t between the
// +i and -i eigenspaces of J; mas({U_t}, V) is the spectral flow of U_t^{-1} V
// through the eigenvalue 1, counted counterclockwise.
template <typename S>
int maslov_complex_variant(const UnitaryPath<S>& graphs, const UnitaryOperator<S>& v, const WindingOptions& opt = {})
{
    auto shifted = [v](const UnitaryOperator<S>& u) {
        return UnitaryOperator<S>(-(u.matrix().adjoint() * v.matrix()), S(1e-9));
    };
    UnitaryPath<S> w;
    w.grid = graphs.grid;
    for (const auto& u : graphs.unitaries) w.unitaries.push_back(shifted(u));
    if (graphs.family) {
        auto fam = graphs.family;
        w.family = [fam, shifted](S t) { return shifted(fam(t)); };
    }
    return winding_through_minus_one(w, opt).winding;
}

template <typename S>
int hormander_index(const SymplecticSpace<S>& space, const LagrangianPath<S>& path, const LagrangianFrame<S>& lambda0,
                    const LagrangianFrame<S>& lambda0_hat, const WindingOptions& opt = {})
{
    return maslov_index(space, path, lambda0, opt) - maslov_index(space, path, lambda0_hat, opt);
}

// Boundary space C^2 of the interval operator i d/dx on [0,1]. Its Green form
// <Au,v> - <u,Av> = i(u(1)conj(v(1)) - u(0)conj(v(0))) has real part <Jx,y> with
// J = diag(-i, i) on (u(0), u(1)).
template <typename S>
SymplecticSpace<S> interval_boundary_space()
{
    return {realified_diagonal_i<S>({-1, 1})};
}

// Complex line span{(1, e^{i theta})} realified.
template <typename S>
LagrangianFrame<S> boundary_line(S theta)
{
    CVector<S> v(2);
    v << Complex<S>(1), std::polar(S(1), theta);
    v /= std::sqrt(S(2));
    RMatrix<S> f(4, 2);
    f.col(0) = realify<S>(v);
    f.col(1) = realify<S>(CVector<S>(Complex<S>(0, 1) * v));
    return {f};
}

// Cauchy data of i d/dx + s: solutions c e^{isx}, boundary values (1, e^{is}).
template <typename S>
LagrangianFrame<S> interval_model_cauchy_data(S s)
{
    return boundary_line<S>(s);
}

}  // namespace spectral
