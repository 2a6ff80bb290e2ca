#include <algorithm>

#include "fibss/exactfield.hpp"
#include "field_ops.hpp"

namespace fibss {

using detail::Col;
using detail::dispatch;

namespace {

void require_field(const FieldSpec& expected, const FieldSpec& got) {
    if (!(expected == got)) throw DimensionError("field mismatch: " + expected.name() + " vs " + got.name());
}

} // namespace

std::size_t mat_rank(const SparseMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    return dispatch(m.field(), [&](auto ops) {
        using Ops = decltype(ops);
        const auto& cols = detail::columns_of<Ops>(m);
        // Eliminate along the shorter side.
        if (m.cols() <= m.rows()) {
            std::vector<Col<Ops>> vs(cols.begin(), cols.end());
            return detail::echelon_of(ops, vs, m.rows()).rows.size();
        }
        auto rows = detail::transpose_columns<Ops>(cols, m.rows());
        return detail::echelon_of(ops, rows, m.cols()).rows.size();
    });
}

SparseMatrix mat_kernel(const SparseMatrix& m) {
    return dispatch(m.field(), [&](auto ops) {
        using Ops = decltype(ops);
        auto rows = detail::transpose_columns<Ops>(detail::columns_of<Ops>(m), m.rows());
        auto ech = detail::echelon_of(ops, rows, m.cols());
        auto rref = ech.reduced_rows();
        std::vector<std::int64_t> kernel_index(m.cols(), -1);
        typename Ops::Columns basis;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (ech.pivot_row[c] >= 0) continue;
            kernel_index[c] = static_cast<std::int64_t>(basis.size());
            basis.emplace_back();
        }
        // Free column f contributes e_f - sum_i R[i][f] e_{lead(i)}.
        for (const auto& row : rref) {
            auto lead = row.front().first;
            for (std::size_t k = 1; k < row.size(); ++k) {
                auto k_idx = kernel_index[row[k].first];
                basis[static_cast<std::size_t>(k_idx)].emplace_back(lead, ops.neg(row[k].second));
            }
        }
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (kernel_index[c] >= 0)
                basis[static_cast<std::size_t>(kernel_index[c])].emplace_back(static_cast<std::uint32_t>(c), ops.one());
        for (auto& v : basis)
            std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return SparseMatrix::from_storage(m.field(), m.cols(), std::move(basis));
    });
}

std::optional<SparseMatrix> mat_solve(const SparseMatrix& m, const SparseMatrix& b) {
    require_field(m.field(), b.field());
    if (b.rows() != m.rows())
        throw DimensionError("solve: right-hand side has " + std::to_string(b.rows()) + " rows, matrix has " +
                             std::to_string(m.rows()));
    return dispatch(m.field(), [&](auto ops) -> std::optional<SparseMatrix> {
        using Ops = decltype(ops);
        const std::size_t n = m.cols();
        // Rows of the augmented matrix [m | b].
        auto rows = detail::transpose_columns<Ops>(detail::columns_of<Ops>(m), m.rows());
        auto rhs = detail::transpose_columns<Ops>(detail::columns_of<Ops>(b), b.rows());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (const auto& [j, v] : rhs[i]) rows[i].emplace_back(static_cast<std::uint32_t>(j + n), v);
        auto ech = detail::echelon_of(ops, rows, n + b.cols());
        for (const auto& row : ech.rows)
            if (row.front().first >= n) return std::nullopt;
        auto rref = ech.reduced_rows();
        std::vector<Col<Ops>> solution_rows(n);
        for (const auto& row : rref) {
            auto lead = row.front().first;
            for (const auto& [j, v] : row)
                if (j >= n) solution_rows[lead].emplace_back(static_cast<std::uint32_t>(j - n), v);
        }
        // solution_rows are rows of x; transpose into columns.
        typename Ops::Columns x(b.cols());
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& [j, v] : solution_rows[i]) x[j].emplace_back(static_cast<std::uint32_t>(i), v);
        return SparseMatrix::from_storage(m.field(), n, std::move(x));
    });
}

SparseMatrix column_basis(const SparseMatrix& m) {
    return dispatch(m.field(), [&](auto ops) {
        using Ops = decltype(ops);
        const auto& cols = detail::columns_of<Ops>(m);
        std::vector<Col<Ops>> vs(cols.begin(), cols.end());
        auto ech = detail::echelon_of(ops, vs, m.rows());
        auto rref = ech.reduced_rows();
        return SparseMatrix::from_storage(m.field(), m.rows(), typename Ops::Columns(std::move(rref)));
    });
}

SparseMatrix complement_columns(const SparseMatrix& base, const SparseMatrix& candidates) {
    require_field(base.field(), candidates.field());
    if (base.rows() != candidates.rows()) throw DimensionError("complement_columns: ambient dimension mismatch");
    return dispatch(base.field(), [&](auto ops) {
        using Ops = decltype(ops);
        const auto& bc = detail::columns_of<Ops>(base);
        std::vector<Col<Ops>> vs(bc.begin(), bc.end());
        auto ech = detail::echelon_of(ops, vs, base.rows());
        const auto& cc = detail::columns_of<Ops>(candidates);
        typename Ops::Columns chosen;
        for (const auto& c : cc)
            if (ech.insert(c)) chosen.push_back(c);
        return SparseMatrix::from_storage(base.field(), base.rows(), std::move(chosen));
    });
}

bool spans_contain(const SparseMatrix& space, const SparseMatrix& vectors) {
    require_field(space.field(), vectors.field());
    if (space.rows() != vectors.rows()) throw DimensionError("spans_contain: ambient dimension mismatch");
    return dispatch(space.field(), [&](auto ops) {
        using Ops = decltype(ops);
        const auto& sc = detail::columns_of<Ops>(space);
        std::vector<Col<Ops>> vs(sc.begin(), sc.end());
        auto ech = detail::echelon_of(ops, vs, space.rows());
        for (const auto& v : detail::columns_of<Ops>(vectors))
            if (!ech.contains(v)) return false;
        return true;
    });
}

std::size_t subquotient_dim(const SparseMatrix& z, const SparseMatrix& b) {
    if (!spans_contain(z, b)) throw InvariantError("subquotient: span(B) is not contained in span(Z)");
    return mat_rank(z) - mat_rank(b);
}

SparseMatrix mat_inverse(const SparseMatrix& m) {
    if (m.rows() != m.cols())
        throw InvariantError("inverse of non-square " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             " matrix");
    if (mat_rank(m) != m.rows()) throw InvariantError("matrix is singular");
    auto x = mat_solve(m, SparseMatrix::identity(m.field(), m.rows()));
    return *x;
}

} // namespace fibss
