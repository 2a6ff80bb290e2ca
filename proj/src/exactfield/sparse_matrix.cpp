#include <algorithm>
#include <map>
#include <sstream>

#include "fibss/exactfield.hpp"
#include "field_ops.hpp"

namespace fibss {

using detail::Col;
using detail::dispatch;

namespace {

template <class Ops>
typename Ops::Elem elem_of(const Ops&, const Scalar& s) {
    if constexpr (std::is_same_v<Ops, detail::PrimeOps>)
        return s.residue();
    else
        return s.rational();
}

template <class Ops>
Scalar scalar_of(const FieldSpec& field, const typename Ops::Elem& e) {
    if constexpr (std::is_same_v<Ops, detail::PrimeOps>)
        return Scalar::from_int(field, static_cast<long long>(e));
    else
        return Scalar::from_fraction(field, e.get_num(), e.get_den());
}

void require_field(const FieldSpec& expected, const FieldSpec& got) {
    if (!(expected == got)) throw DimensionError("field mismatch: " + expected.name() + " vs " + got.name());
}

} // namespace

SparseMatrix::SparseMatrix(FieldSpec field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols) {
    if (field.is_prime())
        data_ = detail::PrimeColumns(cols);
    else
        data_ = detail::RationalColumns(cols);
}

SparseMatrix SparseMatrix::from_storage(FieldSpec field, std::size_t rows, Storage storage) {
    std::size_t cols = std::visit([](const auto& c) { return c.size(); }, storage);
    SparseMatrix m(field, rows, 0);
    m.cols_ = cols;
    m.data_ = std::move(storage);
    return m;
}

SparseMatrix SparseMatrix::from_entries(FieldSpec field, std::size_t rows, std::size_t cols,
                                        const std::vector<Entry>& entries) {
    SparseMatrix m(field, rows, cols);
    dispatch(field, [&](auto ops) {
        using Ops = decltype(ops);
        std::vector<std::map<std::uint32_t, typename Ops::Elem>> acc(cols);
        for (const auto& e : entries) {
            if (e.row >= rows || e.col >= cols)
                throw DimensionError("entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                                     ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
            require_field(field, e.value.field());
            auto [it, fresh] = acc[e.col].try_emplace(static_cast<std::uint32_t>(e.row), ops.zero());
            it->second = ops.add(it->second, elem_of(ops, e.value));
        }
        auto& out = std::get<typename Ops::Columns>(m.data_);
        for (std::size_t j = 0; j < cols; ++j)
            for (auto& [i, v] : acc[j])
                if (!ops.is_zero(v)) out[j].emplace_back(i, v);
    });
    return m;
}

SparseMatrix SparseMatrix::from_ints(FieldSpec field, const std::vector<std::vector<long long>>& dense) {
    std::size_t rows = dense.size();
    std::size_t cols = rows ? dense.front().size() : 0;
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < rows; ++i) {
        if (dense[i].size() != cols) throw DimensionError("ragged dense matrix");
        for (std::size_t j = 0; j < cols; ++j)
            if (dense[i][j] != 0) entries.push_back({i, j, Scalar::from_int(field, dense[i][j])});
    }
    return from_entries(field, rows, cols, entries);
}

SparseMatrix SparseMatrix::from_scalars(FieldSpec field, std::size_t rows, std::size_t cols,
                                        const std::vector<std::vector<Scalar>>& dense) {
    std::vector<Entry> entries;
    if (dense.size() != rows) throw DimensionError("dense matrix row count mismatch");
    for (std::size_t i = 0; i < rows; ++i) {
        if (dense[i].size() != cols) throw DimensionError("ragged dense matrix");
        for (std::size_t j = 0; j < cols; ++j)
            if (!dense[i][j].is_zero()) entries.push_back({i, j, dense[i][j]});
    }
    return from_entries(field, rows, cols, entries);
}

SparseMatrix SparseMatrix::column_vector(FieldSpec field, const std::vector<long long>& values) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] != 0) entries.push_back({i, 0, Scalar::from_int(field, values[i])});
    return from_entries(field, values.size(), 1, entries);
}

SparseMatrix SparseMatrix::column_of_scalars(FieldSpec field, const std::vector<Scalar>& values) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!values[i].is_zero()) entries.push_back({i, 0, values[i]});
    return from_entries(field, values.size(), 1, entries);
}

SparseMatrix SparseMatrix::identity(FieldSpec field, std::size_t n) {
    SparseMatrix m(field, n, n);
    dispatch(field, [&](auto ops) {
        using Ops = decltype(ops);
        auto& out = std::get<typename Ops::Columns>(m.data_);
        for (std::size_t j = 0; j < n; ++j) out[j].emplace_back(static_cast<std::uint32_t>(j), ops.one());
    });
    return m;
}

std::size_t SparseMatrix::nnz() const {
    return std::visit(
        [](const auto& cols) {
            std::size_t n = 0;
            for (const auto& c : cols) n += c.size();
            return n;
        },
        data_);
}

std::vector<SparseMatrix::Entry> SparseMatrix::entries() const {
    std::vector<Entry> out;
    dispatch(field_, [&](auto ops) {
        using Ops = decltype(ops);
        const auto& cols = std::get<typename Ops::Columns>(data_);
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (const auto& [i, v] : cols[j]) out.push_back({i, j, scalar_of<Ops>(field_, v)});
    });
    std::sort(out.begin(), out.end(),
              [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    return out;
}

Scalar SparseMatrix::at(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) throw DimensionError("index out of range");
    return dispatch(field_, [&](auto ops) {
        using Ops = decltype(ops);
        const auto& c = std::get<typename Ops::Columns>(data_)[col];
        auto it = std::lower_bound(c.begin(), c.end(), static_cast<std::uint32_t>(row),
                                   [](const auto& e, std::uint32_t r) { return e.first < r; });
        if (it == c.end() || it->first != row) return Scalar(field_);
        return scalar_of<Ops>(field_, it->second);
    });
}

std::vector<std::vector<Scalar>> SparseMatrix::to_dense() const {
    std::vector<std::vector<Scalar>> out(rows_, std::vector<Scalar>(cols_, Scalar(field_)));
    for (auto& e : entries()) out[e.row][e.col] = e.value;
    return out;
}

SparseMatrix SparseMatrix::transpose() const {
    return dispatch(field_, [&](auto ops) {
        using Ops = decltype(ops);
        auto rows = detail::transpose_columns<Ops>(std::get<typename Ops::Columns>(data_), rows_);
        return from_storage(field_, cols_, typename Ops::Columns(std::move(rows)));
    });
}

SparseMatrix SparseMatrix::column(std::size_t j) const { return select_columns({j}); }

SparseMatrix SparseMatrix::select_columns(const std::vector<std::size_t>& indices) const {
    return dispatch(field_, [&](auto ops) {
        using Ops = decltype(ops);
        const auto& cols = std::get<typename Ops::Columns>(data_);
        typename Ops::Columns out;
        out.reserve(indices.size());
        for (auto j : indices) {
            if (j >= cols_) throw DimensionError("column index out of range");
            out.push_back(cols[j]);
        }
        return from_storage(field_, rows_, std::move(out));
    });
}

SparseMatrix SparseMatrix::select_rows(const std::vector<std::size_t>& indices) const {
    std::vector<std::int64_t> new_index(rows_, -1);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= rows_) throw DimensionError("row index out of range");
        new_index[indices[k]] = static_cast<std::int64_t>(k);
    }
    bool sorted = std::is_sorted(indices.begin(), indices.end());
    return dispatch(field_, [&](auto ops) {
        using Ops = decltype(ops);
        const auto& cols = std::get<typename Ops::Columns>(data_);
        typename Ops::Columns out(cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            for (const auto& [i, v] : cols[j])
                if (new_index[i] >= 0) out[j].emplace_back(static_cast<std::uint32_t>(new_index[i]), v);
            if (!sorted)
                std::sort(out[j].begin(), out[j].end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        }
        return from_storage(field_, indices.size(), std::move(out));
    });
}

SparseMatrix SparseMatrix::embed_rows(std::size_t new_rows, const std::vector<std::size_t>& positions) const {
    if (positions.size() != rows_) throw DimensionError("embed_rows: position count mismatch");
    for (auto p : positions)
        if (p >= new_rows) throw DimensionError("embed_rows: position out of range");
    bool sorted = std::is_sorted(positions.begin(), positions.end());
    return dispatch(field_, [&](auto ops) {
        using Ops = decltype(ops);
        const auto& cols = std::get<typename Ops::Columns>(data_);
        typename Ops::Columns out(cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            for (const auto& [i, v] : cols[j]) out[j].emplace_back(static_cast<std::uint32_t>(positions[i]), v);
            if (!sorted)
                std::sort(out[j].begin(), out[j].end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        }
        return from_storage(field_, new_rows, std::move(out));
    });
}

SparseMatrix SparseMatrix::scaled(const Scalar& factor) const {
    require_field(field_, factor.field());
    if (factor.is_zero()) return SparseMatrix(field_, rows_, cols_);
    return dispatch(field_, [&](auto ops) {
        using Ops = decltype(ops);
        auto cols = std::get<typename Ops::Columns>(data_);
        auto f = elem_of(ops, factor);
        for (auto& c : cols) detail::scale_in_place(ops, c, f);
        return from_storage(field_, rows_, std::move(cols));
    });
}

bool SparseMatrix::operator==(const SparseMatrix& rhs) const {
    return field_ == rhs.field_ && rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_;
}

std::string SparseMatrix::to_string() const {
    std::ostringstream os;
    os << "[" << rows_ << "x" << cols_ << " over " << field_.name() << "]";
    for (std::size_t i = 0; i < rows_; ++i) {
        os << "\n ";
        for (std::size_t j = 0; j < cols_; ++j) os << " " << at(i, j).to_string();
    }
    return os.str();
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    require_field(a.field(), b.field());
    if (a.cols() != b.rows())
        throw DimensionError("product of " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    return dispatch(a.field(), [&](auto ops) {
        using Ops = decltype(ops);
        const auto& ac = detail::columns_of<Ops>(a);
        const auto& bc = detail::columns_of<Ops>(b);
        typename Ops::Columns out(b.cols());
        std::vector<typename Ops::Elem> acc(a.rows(), ops.zero());
        std::vector<char> touched(a.rows(), 0);
        std::vector<std::uint32_t> pattern;
        for (std::size_t j = 0; j < b.cols(); ++j) {
            pattern.clear();
            for (const auto& [k, bv] : bc[j]) {
                for (const auto& [i, av] : ac[k]) {
                    if (!touched[i]) {
                        touched[i] = 1;
                        pattern.push_back(i);
                        acc[i] = ops.mul(av, bv);
                    } else {
                        acc[i] = ops.add(acc[i], ops.mul(av, bv));
                    }
                }
            }
            std::sort(pattern.begin(), pattern.end());
            for (auto i : pattern) {
                if (!ops.is_zero(acc[i])) out[j].emplace_back(i, acc[i]);
                touched[i] = 0;
            }
        }
        return SparseMatrix::from_storage(a.field(), a.rows(), std::move(out));
    });
}

namespace {

SparseMatrix combine(const SparseMatrix& a, const SparseMatrix& b, bool subtract) {
    require_field(a.field(), b.field());
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("sum of differently shaped matrices");
    return dispatch(a.field(), [&](auto ops) {
        using Ops = decltype(ops);
        const auto& ac = detail::columns_of<Ops>(a);
        const auto& bc = detail::columns_of<Ops>(b);
        typename Ops::Columns out(a.cols());
        auto coef = subtract ? ops.neg(ops.one()) : ops.one();
        for (std::size_t j = 0; j < a.cols(); ++j) out[j] = detail::axpy(ops, ac[j], coef, bc[j]);
        return SparseMatrix::from_storage(a.field(), a.rows(), std::move(out));
    });
}

} // namespace

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) { return combine(a, b, false); }
SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) { return combine(a, b, true); }

SparseMatrix empty_columns(FieldSpec field, std::size_t rows) { return SparseMatrix(field, rows, 0); }

SparseMatrix hstack(const std::vector<SparseMatrix>& blocks) {
    if (blocks.empty()) throw DimensionError("hstack of nothing");
    const auto& field = blocks.front().field();
    std::size_t rows = blocks.front().rows();
    for (const auto& b : blocks) {
        require_field(field, b.field());
        if (b.rows() != rows) throw DimensionError("hstack row mismatch");
    }
    return dispatch(field, [&](auto ops) {
        using Ops = decltype(ops);
        typename Ops::Columns out;
        for (const auto& b : blocks) {
            const auto& c = detail::columns_of<Ops>(b);
            out.insert(out.end(), c.begin(), c.end());
        }
        return SparseMatrix::from_storage(field, rows, std::move(out));
    });
}

SparseMatrix vstack(const std::vector<SparseMatrix>& blocks) {
    if (blocks.empty()) throw DimensionError("vstack of nothing");
    const auto& field = blocks.front().field();
    std::size_t cols = blocks.front().cols();
    std::size_t rows = 0;
    for (const auto& b : blocks) {
        require_field(field, b.field());
        if (b.cols() != cols) throw DimensionError("vstack column mismatch");
        rows += b.rows();
    }
    return dispatch(field, [&](auto ops) {
        using Ops = decltype(ops);
        typename Ops::Columns out(cols);
        std::uint32_t offset = 0;
        for (const auto& b : blocks) {
            const auto& c = detail::columns_of<Ops>(b);
            for (std::size_t j = 0; j < cols; ++j)
                for (const auto& [i, v] : c[j]) out[j].emplace_back(i + offset, v);
            offset += static_cast<std::uint32_t>(b.rows());
        }
        return SparseMatrix::from_storage(field, rows, std::move(out));
    });
}

} // namespace fibss
