#pragma once

#include "spectral/char_forms.hpp"
#include "spectral/eta_zeta.hpp"
#include "spectral/maslov.hpp"
#include "spectral/spectral_flow.hpp"

#include <json.hpp>

namespace spectral {

// {dim, entries: [[re, im], ...]} row-major.
template <typename S>
nlohmann::json matrix_to_json(const CMatrix<S>& m)
{
    if (m.rows() != m.cols()) throw OperatorError("matrix_to_json: square matrix expected");
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back({double(m(i, j).real()), double(m(i, j).imag())});
    return {{"dim", m.rows()}, {"entries", entries}};
}

template <typename S>
CMatrix<S> matrix_from_json(const nlohmann::json& j)
{
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto& e = j.at("entries");
    if (dim < 1 || e.size() != size_t(dim * dim)) throw OperatorError("matrix_from_json: entries do not match dim");
    CMatrix<S> m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index k = 0; k < dim; ++k) {
            const auto& z = e[size_t(i * dim + k)];
            m(i, k) = Complex<S>(z.at(0).get<double>(), z.at(1).get<double>());
        }
    return m;
}

template <typename S>
nlohmann::json to_json(const HermitianOperator<S>& h) { return matrix_to_json<S>(h.matrix()); }

template <typename S>
nlohmann::json to_json(const UnitaryOperator<S>& u) { return matrix_to_json<S>(u.matrix()); }

template <typename S>
HermitianOperator<S> hermitian_from_json(const nlohmann::json& j) { return HermitianOperator<S>(matrix_from_json<S>(j)); }

template <typename S>
UnitaryOperator<S> unitary_from_json(const nlohmann::json& j) { return UnitaryOperator<S>(matrix_from_json<S>(j)); }

// {grid: [...], operators: [...]}
template <typename S>
nlohmann::json to_json(const OperatorPath<S>& p)
{
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& h : p.operators) ops.push_back(to_json(h));
    std::vector<double> grid(p.grid.begin(), p.grid.end());
    return {{"grid", grid}, {"operators", ops}};
}

template <typename S>
OperatorPath<S> operator_path_from_json(const nlohmann::json& j)
{
    OperatorPath<S> p;
    for (const auto& t : j.at("grid")) p.grid.push_back(S(t.get<double>()));
    for (const auto& h : j.at("operators")) p.operators.push_back(hermitian_from_json<S>(h));
    if (p.grid.size() != p.operators.size()) throw OperatorError("operator path: grid and operators differ in length");
    for (size_t i = 1; i < p.grid.size(); ++i)
        if (!(p.grid[i] > p.grid[i - 1])) throw OperatorError("operator path: grid must be strictly ascending");
    return p;
}

// Orthonormal columns, row-major: {rows, cols, entries}.
template <typename S>
nlohmann::json to_json(const LagrangianFrame<S>& f)
{
    std::vector<double> e;
    for (Eigen::Index i = 0; i < f.frame.rows(); ++i)
        for (Eigen::Index k = 0; k < f.frame.cols(); ++k) e.push_back(double(f.frame(i, k)));
    return {{"rows", f.frame.rows()}, {"cols", f.frame.cols()}, {"entries", e}};
}

template <typename S>
LagrangianFrame<S> frame_from_json(const nlohmann::json& j)
{
    const auto rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
    const auto& e = j.at("entries");
    if (e.size() != size_t(rows * cols)) throw OperatorError("frame_from_json: entries do not match shape");
    RMatrix<S> m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = S(e[size_t(i * cols + k)].get<double>());
    return {m};
}

// {method, value, error, mod_z}
nlohmann::json to_json(const EtaResult& r);

// Coefficient map of a series with rationals as strings.
nlohmann::json to_json(const GradedSeries& s);

}  // namespace spectral
