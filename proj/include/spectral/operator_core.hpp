#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spectral {

template <typename S>
using Complex = std::complex<S>;
template <typename S>
using CMatrix = Eigen::Matrix<Complex<S>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using CVector = Eigen::Matrix<Complex<S>, Eigen::Dynamic, 1>;
template <typename S>
using RMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using RVector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

class OperatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename S>
S operator_norm(const CMatrix<S>& a)
{
    if (a.size() == 0) return S(0);
    Eigen::JacobiSVD<CMatrix<S>> svd(a);
    return svd.singularValues()(0);
}

template <typename S>
S max_asymmetry(const CMatrix<S>& a)
{
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

// Finite self-adjoint operator. Construction checks hermiticity relative to the
// largest entry and stores the symmetrized matrix.
template <typename S>
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(const CMatrix<S>& m, S tol = S(1e-10))
    {
        if (m.rows() != m.cols() || m.rows() < 1)
            throw OperatorError("hermitian operator must be square with dim >= 1");
        const S scale = std::max(S(1), m.cwiseAbs().maxCoeff());
        const S asym = max_asymmetry<S>(m);
        if (asym > tol * scale) {
            std::ostringstream os;
            os << "operator is not hermitian: max asymmetry " << asym;
            throw OperatorError(os.str());
        }
        m_ = (m + m.adjoint()) / S(2);
    }

    static HermitianOperator diagonal(const RVector<S>& d)
    {
        return HermitianOperator(d.template cast<Complex<S>>().asDiagonal().toDenseMatrix());
    }

    Eigen::Index dim() const { return m_.rows(); }
    const CMatrix<S>& matrix() const { return m_; }

private:
    CMatrix<S> m_;
};

template <typename S>
class UnitaryOperator {
public:
    UnitaryOperator() = default;
    explicit UnitaryOperator(const CMatrix<S>& m, S tol = S(1e-10))
    {
        if (m.rows() != m.cols() || m.rows() < 1)
            throw OperatorError("unitary operator must be square with dim >= 1");
        const S err = (m * m.adjoint() - CMatrix<S>::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
        if (err > tol) {
            std::ostringstream os;
            os << "operator is not unitary: max |UU* - I| = " << err;
            throw OperatorError(os.str());
        }
        m_ = m;
    }

    Eigen::Index dim() const { return m_.rows(); }
    const CMatrix<S>& matrix() const { return m_; }

private:
    CMatrix<S> m_;
};

template <typename S>
struct SpectralResolution {
    RVector<S> eigenvalues;   // ascending
    CMatrix<S> eigenvectors;  // columns
    Eigen::Index source_dim = 0;
};

template <typename S>
SpectralResolution<S> spectral_resolution(const HermitianOperator<S>& h)
{
    Eigen::SelfAdjointEigenSolver<CMatrix<S>> es(h.matrix());
    if (es.info() != Eigen::Success) throw OperatorError("eigen decomposition failed");
    return {es.eigenvalues(), es.eigenvectors(), h.dim()};
}

// f(H) = V diag(f(lambda)) V*.
template <typename S, typename F>
CMatrix<S> apply_function(const SpectralResolution<S>& r, F&& f)
{
    const Eigen::Index n = r.eigenvalues.size();
    CVector<S> d(n);
    for (Eigen::Index j = 0; j < n; ++j) d(j) = Complex<S>(f(r.eigenvalues(j)));
    return r.eigenvectors * d.asDiagonal() * r.eigenvectors.adjoint();
}

template <typename S>
S resolution_residual(const HermitianOperator<S>& h, const SpectralResolution<S>& r)
{
    const CMatrix<S>& v = r.eigenvectors;
    CMatrix<S> res = h.matrix() * v - v * r.eigenvalues.template cast<Complex<S>>().asDiagonal();
    S worst = 0;
    for (Eigen::Index j = 0; j < res.cols(); ++j) worst = std::max(worst, res.col(j).norm());
    return worst;
}

template <typename S>
UnitaryOperator<S> cayley(const HermitianOperator<S>& h)
{
    const Complex<S> i(0, 1);
    auto r = spectral_resolution(h);
    return UnitaryOperator<S>(apply_function(r, [&](S l) { return (l - i) / (l + i); }));
}

template <typename S>
HermitianOperator<S> riesz(const HermitianOperator<S>& h)
{
    auto r = spectral_resolution(h);
    return HermitianOperator<S>(apply_function(r, [](S l) { return l / std::sqrt(S(1) + l * l); }));
}

// (T + i)^{-1} through the eigenbasis.
template <typename S>
CMatrix<S> resolvent_at_minus_i(const HermitianOperator<S>& t)
{
    const Complex<S> i(0, 1);
    auto r = spectral_resolution(t);
    return apply_function(r, [&](S l) { return Complex<S>(1) / (l + i); });
}

template <typename S>
S gap_distance(const HermitianOperator<S>& t1, const HermitianOperator<S>& t2)
{
    if (t1.dim() != t2.dim()) throw OperatorError("gap_distance: dimension mismatch");
    return operator_norm<S>(resolvent_at_minus_i(t1) - resolvent_at_minus_i(t2));
}

// (I + A)^{-1} for A = X*X >= 0, evaluated on the eigenbasis of A.
template <typename S>
CMatrix<S> inverse_one_plus(const CMatrix<S>& a)
{
    auto r = spectral_resolution(HermitianOperator<S>(a, S(1e-8)));
    return apply_function(r, [](S l) { return S(1) / (S(1) + l); });
}

template <typename S>
CMatrix<S> block_2x2(const CMatrix<S>& a, const CMatrix<S>& b, const CMatrix<S>& c, const CMatrix<S>& d)
{
    const Eigen::Index n = a.rows();
    CMatrix<S> p(2 * n, 2 * n);
    p << a, b, c, d;
    return p;
}

// The three block expressions of the graph projection of a bounded T.
template <typename S>
std::array<CMatrix<S>, 3> graph_projection_forms(const CMatrix<S>& t)
{
    const Eigen::Index n = t.rows();
    const CMatrix<S> ts = t.adjoint();
    const CMatrix<S> rt = inverse_one_plus<S>(ts * t);
    const CMatrix<S> rts = inverse_one_plus<S>(t * ts);
    const CMatrix<S> id = CMatrix<S>::Identity(n, n);
    return {block_2x2<S>(rt, rt * ts, t * rt, t * rt * ts),
            block_2x2<S>(rt, ts * rts, t * rt, t * ts * rts),
            block_2x2<S>(rt, ts * rts, t * rt, id - rts)};
}

template <typename S>
CMatrix<S> graph_projection(const CMatrix<S>& t)
{
    if (t.rows() != t.cols()) throw OperatorError("graph_projection: square operator expected");
    return graph_projection_forms<S>(t)[0];
}

template <typename S>
HermitianOperator<S> graph_projection(const HermitianOperator<S>& t)
{
    return HermitianOperator<S>(graph_projection<S>(t.matrix()));
}

template <typename S>
struct FiniteLinearMap {
    CMatrix<S> entries;
    S rank_tol = S(1e-9);
};

template <typename S>
struct IndexResult {
    int rank = 0;
    int kernel = 0;
    int cokernel = 0;
    int index = 0;
    S sigma_max = 0;
    S cutoff = 0;
    S smallest_kept = 0;     // smallest singular value above the cutoff
    S largest_dropped = 0;   // largest singular value below the cutoff
    bool unstable = false;
};

template <typename S>
IndexResult<S> finite_index(const FiniteLinearMap<S>& f)
{
    IndexResult<S> out;
    const Eigen::Index rows = f.entries.rows(), cols = f.entries.cols();
    if (rows == 0 || cols == 0) {
        out.kernel = int(cols);
        out.cokernel = int(rows);
        out.index = int(cols) - int(rows);
        return out;
    }
    Eigen::JacobiSVD<CMatrix<S>> svd(f.entries);
    const RVector<S>& sv = svd.singularValues();
    out.sigma_max = sv(0);
    out.cutoff = f.rank_tol * sv(0);
    out.smallest_kept = sv(0);
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
        if (sv(j) > out.cutoff && sv(0) > 0) {
            ++out.rank;
            out.smallest_kept = sv(j);
        } else {
            out.largest_dropped = std::max(out.largest_dropped, sv(j));
        }
        if (sv(0) > 0 && sv(j) > out.cutoff / S(10) && sv(j) < out.cutoff * S(10)) out.unstable = true;
    }
    out.kernel = int(cols) - out.rank;
    out.cokernel = int(rows) - out.rank;
    out.index = out.kernel - out.cokernel;
    return out;
}

template <typename S>
bool is_projection(const CMatrix<S>& p, S tol = S(1e-10))
{
    if (p.rows() != p.cols()) return false;
    return (p * p - p).cwiseAbs().maxCoeff() <= tol && max_asymmetry<S>(p) <= tol;
}

// Orthonormal basis of range(P) for an orthogonal projection P.
template <typename S>
CMatrix<S> projection_range(const CMatrix<S>& p)
{
    auto r = spectral_resolution(HermitianOperator<S>(p));
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < r.eigenvalues.size(); ++j)
        if (r.eigenvalues(j) > S(0.5)) keep.push_back(j);
    CMatrix<S> basis(p.rows(), Eigen::Index(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) basis.col(Eigen::Index(k)) = r.eigenvectors.col(keep[k]);
    return basis;
}

// i(P2, P1) = index of P2 P1 : range P1 -> range P2.
template <typename S>
IndexResult<S> virtual_codimension_detail(const CMatrix<S>& p2, const CMatrix<S>& p1, S rank_tol = S(1e-9))
{
    if (!is_projection<S>(p1) || !is_projection<S>(p2))
        throw OperatorError("virtual_codimension: inputs must be orthogonal projections");
    if (p1.rows() != p2.rows()) throw OperatorError("virtual_codimension: dimension mismatch");
    const CMatrix<S> b1 = projection_range<S>(p1);
    const CMatrix<S> b2 = projection_range<S>(p2);
    return finite_index<S>({b2.adjoint() * p2 * p1 * b1, rank_tol});
}

template <typename S>
int virtual_codimension(const CMatrix<S>& p2, const CMatrix<S>& p1)
{
    return virtual_codimension_detail<S>(p2, p1).index;
}

template <typename S>
S riesz_lipschitz_ratio(const HermitianOperator<S>& s, const HermitianOperator<S>& c)
{
    const S nc = operator_norm<S>(c.matrix());
    if (nc == S(0)) throw OperatorError("riesz_lipschitz_ratio: C must be nonzero");
    const HermitianOperator<S> sc(s.matrix() + c.matrix());
    return operator_norm<S>(riesz(sc).matrix() - riesz(s).matrix()) / nc;
}

// Truncated multiplication-operator pair: M = diag(1..N), T_n = M - 2n e_n e_n^*.
template <typename S>
std::pair<HermitianOperator<S>, HermitianOperator<S>> fuglede_pair(int n, int rank)
{
    if (n < 1 || rank < n) throw OperatorError("fuglede_pair: need 1 <= n <= rank");
    RVector<S> d(rank);
    for (int j = 0; j < rank; ++j) d(j) = S(j + 1);
    RVector<S> dn = d;
    dn(n - 1) = S(-n);
    return {HermitianOperator<S>::diagonal(d), HermitianOperator<S>::diagonal(dn)};
}

}  // namespace spectral
