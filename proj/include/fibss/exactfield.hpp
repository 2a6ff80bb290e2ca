#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "fibss/errors.hpp"

namespace fibss {

/// Coefficient field: a word-sized prime field F_p or the rationals.
class FieldSpec {
public:
    enum class Kind { Prime, Rational };

    /// Throws std::invalid_argument unless p is a prime below 2^32.
    static FieldSpec prime(std::uint64_t p);
    static FieldSpec rationals() { return FieldSpec(Kind::Rational, 0); }
    /// Accepts "F2", "F3", ..., "Q".
    static FieldSpec parse(std::string_view name);

    Kind kind() const { return kind_; }
    bool is_prime() const { return kind_ == Kind::Prime; }
    /// p for F_p, 0 for Q.
    std::uint64_t characteristic() const { return p_; }
    std::string name() const;

    bool operator==(const FieldSpec&) const = default;

private:
    FieldSpec(Kind kind, std::uint64_t p) : kind_(kind), p_(p) {}

    Kind kind_;
    std::uint64_t p_;
};

bool is_prime_number(std::uint64_t n);

/// An element of a field chosen at run time. Values are kept canonical:
/// least nonnegative residue in F_p, reduced fraction with positive
/// denominator in Q.
class Scalar {
public:
    explicit Scalar(FieldSpec field);  // zero
    static Scalar from_int(FieldSpec field, long long value);
    static Scalar from_fraction(FieldSpec field, const mpz_class& num, const mpz_class& den);
    /// Decimal integer or "a/b". Throws std::invalid_argument on bad syntax
    /// and on a zero (or, in F_p, non-invertible) denominator.
    static Scalar parse(FieldSpec field, std::string_view text);

    const FieldSpec& field() const { return field_; }
    bool is_zero() const;
    bool is_one() const;

    std::uint64_t residue() const { return std::get<std::uint64_t>(value_); }
    const mpq_class& rational() const { return std::get<mpq_class>(value_); }

    Scalar operator+(const Scalar& rhs) const;
    Scalar operator-(const Scalar& rhs) const;
    Scalar operator*(const Scalar& rhs) const;
    Scalar operator/(const Scalar& rhs) const;
    Scalar operator-() const;
    /// Throws std::domain_error on zero.
    Scalar inverse() const;

    bool operator==(const Scalar& rhs) const;

    std::string to_string() const;

private:
    FieldSpec field_;
    std::variant<std::uint64_t, mpq_class> value_;
};

namespace detail {

template <class E>
using SparseColumn = std::vector<std::pair<std::uint32_t, E>>;

using PrimeColumns = std::vector<SparseColumn<std::uint64_t>>;
using RationalColumns = std::vector<SparseColumn<mpq_class>>;

} // namespace detail

/// Immutable sparse matrix over a FieldSpec, stored column-major with rows
/// sorted inside every column and no explicit zeros.
class SparseMatrix {
public:
    struct Entry {
        std::size_t row;
        std::size_t col;
        Scalar value;
    };

    using Storage = std::variant<detail::PrimeColumns, detail::RationalColumns>;

    SparseMatrix(FieldSpec field, std::size_t rows, std::size_t cols);

    /// Duplicate positions are summed and zeros dropped.
    static SparseMatrix from_entries(FieldSpec field, std::size_t rows, std::size_t cols,
                                     const std::vector<Entry>& entries);
    static SparseMatrix from_ints(FieldSpec field, const std::vector<std::vector<long long>>& dense);
    static SparseMatrix from_scalars(FieldSpec field, std::size_t rows, std::size_t cols,
                                     const std::vector<std::vector<Scalar>>& dense);
    static SparseMatrix column_vector(FieldSpec field, const std::vector<long long>& values);
    static SparseMatrix column_of_scalars(FieldSpec field, const std::vector<Scalar>& values);
    static SparseMatrix identity(FieldSpec field, std::size_t n);
    /// Takes ownership of already-canonical typed columns.
    static SparseMatrix from_storage(FieldSpec field, std::size_t rows, Storage storage);

    const FieldSpec& field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const;
    bool is_zero() const { return nnz() == 0; }

    /// Entries sorted by (row, col).
    std::vector<Entry> entries() const;
    Scalar at(std::size_t row, std::size_t col) const;
    std::vector<std::vector<Scalar>> to_dense() const;

    const Storage& storage() const { return data_; }

    SparseMatrix transpose() const;
    SparseMatrix column(std::size_t j) const;
    SparseMatrix select_columns(const std::vector<std::size_t>& indices) const;
    SparseMatrix select_rows(const std::vector<std::size_t>& indices) const;
    /// Places this matrix's rows at the given positions of a taller matrix.
    SparseMatrix embed_rows(std::size_t new_rows, const std::vector<std::size_t>& positions) const;
    SparseMatrix scaled(const Scalar& factor) const;

    bool operator==(const SparseMatrix& rhs) const;

    std::string to_string() const;

private:
    FieldSpec field_;
    std::size_t rows_;
    std::size_t cols_;
    Storage data_;
};

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b);

SparseMatrix hstack(const std::vector<SparseMatrix>& blocks);
SparseMatrix vstack(const std::vector<SparseMatrix>& blocks);
/// Empty matrix with `rows` rows and no columns.
SparseMatrix empty_columns(FieldSpec field, std::size_t rows);

std::size_t mat_rank(const SparseMatrix& m);

/// Basis of {v : m v = 0} as the columns of the result, one per free column
/// of the reduced row echelon form (canonical for a given m).
SparseMatrix mat_kernel(const SparseMatrix& m);

/// Some x with m x = b, or nullopt if b is not in the column span. b may carry
/// several right-hand sides; the solution then has one column per column of
/// b and nullopt means at least one of them is unsolvable.
std::optional<SparseMatrix> mat_solve(const SparseMatrix& m, const SparseMatrix& b);

/// dim span(z) - dim span(b). Throws InvariantError unless span(b) lies in
/// span(z).
std::size_t subquotient_dim(const SparseMatrix& z, const SparseMatrix& b);

/// Canonical basis of the column span: the reduced row echelon form of m^T,
/// transposed back.
SparseMatrix column_basis(const SparseMatrix& m);

/// Columns of `candidates`, in order, that are independent modulo
/// span(base) and the previously chosen ones. Returned as original vectors.
SparseMatrix complement_columns(const SparseMatrix& base, const SparseMatrix& candidates);

/// True iff every column of `vectors` lies in the column span of `space`.
bool spans_contain(const SparseMatrix& space, const SparseMatrix& vectors);

/// Throws InvariantError if m is not square and invertible.
SparseMatrix mat_inverse(const SparseMatrix& m);

} // namespace fibss
