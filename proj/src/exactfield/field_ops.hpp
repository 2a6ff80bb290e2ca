#pragma once

// Typed field arithmetic and sparse-vector kernels shared by the
// exactfield translation units. Not installed.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "fibss/exactfield.hpp"

namespace fibss::detail {

struct PrimeOps {
    using Elem = std::uint64_t;
    using Columns = PrimeColumns;

    std::uint64_t p;

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    bool is_zero(Elem a) const { return a == 0; }
    Elem add(Elem a, Elem b) const {
        Elem s = a + b;
        return s >= p ? s - p : s;
    }
    Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p - b; }
    Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
    Elem mul(Elem a, Elem b) const { return a * b % p; }
    Elem inv(Elem a) const {
        if (a == 0) throw std::domain_error("inverse of zero");
        // extended Euclid on (a, p)
        std::int64_t old_r = static_cast<std::int64_t>(a), r = static_cast<std::int64_t>(p);
        std::int64_t old_s = 1, s = 0;
        while (r != 0) {
            std::int64_t q = old_r / r;
            std::int64_t t = old_r - q * r;
            old_r = r;
            r = t;
            t = old_s - q * s;
            old_s = s;
            s = t;
        }
        std::int64_t m = static_cast<std::int64_t>(p);
        return static_cast<Elem>(((old_s % m) + m) % m);
    }
    Elem from_int(long long v) const {
        long long m = static_cast<long long>(p);
        return static_cast<Elem>(((v % m) + m) % m);
    }
};

struct RationalOps {
    using Elem = mpq_class;
    using Columns = RationalColumns;

    Elem zero() const { return Elem(0); }
    Elem one() const { return Elem(1); }
    bool is_zero(const Elem& a) const { return sgn(a) == 0; }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem inv(const Elem& a) const {
        if (sgn(a) == 0) throw std::domain_error("inverse of zero");
        return 1 / a;
    }
    Elem from_int(long long v) const { return Elem(static_cast<long>(v)); }
};

template <class F>
decltype(auto) dispatch(const FieldSpec& field, F&& f) {
    if (field.is_prime()) return f(PrimeOps{field.characteristic()});
    return f(RationalOps{});
}

template <class Ops>
using Col = SparseColumn<typename Ops::Elem>;

template <class Ops>
const typename Ops::Columns& columns_of(const SparseMatrix& m) {
    return std::get<typename Ops::Columns>(m.storage());
}

// y + a * x for sorted sparse vectors.
template <class Ops>
Col<Ops> axpy(const Ops& ops, const Col<Ops>& y, const typename Ops::Elem& a, const Col<Ops>& x) {
    Col<Ops> out;
    out.reserve(y.size() + x.size());
    std::size_t i = 0, j = 0;
    while (i < y.size() || j < x.size()) {
        if (j == x.size() || (i < y.size() && y[i].first < x[j].first)) {
            out.push_back(y[i++]);
        } else if (i == y.size() || x[j].first < y[i].first) {
            auto v = ops.mul(a, x[j].second);
            if (!ops.is_zero(v)) out.emplace_back(x[j].first, std::move(v));
            ++j;
        } else {
            auto v = ops.add(y[i].second, ops.mul(a, x[j].second));
            if (!ops.is_zero(v)) out.emplace_back(y[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

template <class Ops>
void scale_in_place(const Ops& ops, Col<Ops>& v, const typename Ops::Elem& a) {
    for (auto& e : v) e.second = ops.mul(e.second, a);
}

// Incremental row echelon structure. Rows are normalized so that their
// leading coefficient is one; pivot_row maps a column to the row leading
// there, or -1.
template <class Ops>
struct Echelon {
    Ops ops;
    std::vector<Col<Ops>> rows;
    std::vector<std::int64_t> pivot_row;

    Echelon(Ops o, std::size_t ncols) : ops(std::move(o)), pivot_row(ncols, -1) {}

    // Reduces v by leading terms until its leading column is free.
    void reduce(Col<Ops>& v) const {
        while (!v.empty()) {
            auto r = pivot_row[v.front().first];
            if (r < 0) return;
            auto coef = ops.neg(v.front().second);
            v = axpy(ops, v, coef, rows[static_cast<std::size_t>(r)]);
        }
    }

    // Returns true if v was independent and has been added.
    bool insert(Col<Ops> v) {
        reduce(v);
        if (v.empty()) return false;
        auto lead_inv = ops.inv(v.front().second);
        scale_in_place(ops, v, lead_inv);
        pivot_row[v.front().first] = static_cast<std::int64_t>(rows.size());
        rows.push_back(std::move(v));
        return true;
    }

    bool contains(Col<Ops> v) const {
        reduce(v);
        return v.empty();
    }

    // Clears every pivot column from the other rows, giving the reduced row
    // echelon form. Rows are returned sorted by leading column.
    std::vector<Col<Ops>> reduced_rows() {
        std::vector<std::size_t> order(rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return rows[a].front().first > rows[b].front().first;
        });
        for (auto i : order) {
            auto& v = rows[i];
            std::size_t k = 1;
            while (k < v.size()) {
                auto r = pivot_row[v[k].first];
                if (r < 0) {
                    ++k;
                    continue;
                }
                auto coef = ops.neg(v[k].second);
                v = axpy(ops, v, coef, rows[static_cast<std::size_t>(r)]);
            }
        }
        std::vector<Col<Ops>> out(rows.begin(), rows.end());
        std::sort(out.begin(), out.end(),
                  [](const Col<Ops>& a, const Col<Ops>& b) { return a.front().first < b.front().first; });
        return out;
    }
};

// Sparse rows first; a cheap Markowitz-style ordering that limits fill-in.
template <class Ops>
std::vector<std::size_t> sparsity_order(const std::vector<Col<Ops>>& vs) {
    std::vector<std::size_t> order(vs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vs[a].size() < vs[b].size(); });
    return order;
}

template <class Ops>
Echelon<Ops> echelon_of(const Ops& ops, const std::vector<Col<Ops>>& vs, std::size_t ncols) {
    Echelon<Ops> ech(ops, ncols);
    for (auto i : sparsity_order<Ops>(vs)) ech.insert(vs[i]);
    return ech;
}

template <class Ops>
std::vector<Col<Ops>> transpose_columns(const typename Ops::Columns& cols, std::size_t nrows) {
    std::vector<Col<Ops>> rows(nrows);
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (const auto& [i, v] : cols[j]) rows[i].emplace_back(static_cast<std::uint32_t>(j), v);
    return rows;
}

} // namespace fibss::detail
