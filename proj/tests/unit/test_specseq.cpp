#include <doctest.h>

#include <random>

#include "fibss/specseq.hpp"
#include "support/checks.hpp"
#include "support/models.hpp"

using namespace fibss;

namespace {

const FieldSpec Q = FieldSpec::rationals();
const FieldSpec F2 = FieldSpec::prime(2);
const FieldSpec F3 = FieldSpec::prime(3);

using Dims = std::map<int, std::size_t>;

// m*f0, m*f1 over the minimum; M*f0, M*f1 over the maximum of S^2.
SplitFilteredComplex hopf(FieldSpec f) {
    GradedBasis b({{"m*f0", 0}, {"m*f1", 1}, {"M*f0", 2}, {"M*f1", 3}});
    auto d = SparseMatrix::from_entries(f, 4, 4, {{2, 1, Scalar::from_int(f, 1)}});
    return SplitFilteredComplex(CochainComplex::from_global(f, b, d), {0, 0, 2, 2}, 2);
}

CochainComplex interval(FieldSpec f) {
    GradedBasis b({{"v0", 0}, {"v1", 0}, {"e", 1}});
    return CochainComplex(f, b, {{0, SparseMatrix::from_ints(f, {{-1, 1}})}});
}

SparseMatrix basis_vector(FieldSpec f, std::size_t n, std::size_t i) {
    return SparseMatrix::from_entries(f, n, 1, {{i, 0, Scalar::from_int(f, 1)}});
}

// Degree-preserving basis change g with ∂' = g ∂ g^{-1} and F'_p = g F_p.
FilteredComplex twisted(const SplitFilteredComplex& s, std::mt19937_64& rng) {
    const auto& c = s.complex();
    const auto& field = c.field();
    std::map<int, SparseMatrix> g, ginv;
    for (int k : c.degrees()) {
        const auto n = c.dim(k);
        SparseMatrix m(field, n, n);
        do {
            std::vector<SparseMatrix::Entry> e;
            std::uniform_int_distribution<std::size_t> any(0, n - 1);
            for (std::size_t i = 0; i < n; ++i) e.push_back({i, i, testing::random_unit(rng, field)});
            for (std::size_t t = 0; t < 2 * n; ++t) e.push_back({any(rng), any(rng), testing::random_unit(rng, field)});
            m = SparseMatrix::from_entries(field, n, n, e);
        } while (mat_rank(m) != n);
        g.emplace(k, m);
        ginv.emplace(k, mat_inverse(m));
    }
    std::map<int, SparseMatrix> d;
    for (int k : c.degrees())
        if (c.dim(k + 1) > 0) d.emplace(k, g.at(k + 1) * c.d(k) * ginv.at(k));
    CochainComplex image(field, c.basis(), d);
    auto plain = s.to_filtered();
    std::vector<std::map<int, SparseMatrix>> spans(s.length());
    for (int p = 1; p <= s.length(); ++p)
        for (int k : c.degrees()) spans[p - 1].emplace(k, g.at(k) * plain.subspace(p, k));
    return FilteredComplex(image, spans);
}

} // namespace

TEST_CASE("trivial filtration: E_1 is the cohomology and nothing moves") {
    std::mt19937_64 rng(3);
    auto c = testing::random_complex(rng, Q, 10, 0, 3);
    auto fc = FilteredComplex::from_levels(c, std::vector<int>(c.basis().size(), 0), 0);
    SpectralSequence ss(fc);
    auto h = cohomology(c);
    for (int k : c.degrees()) CHECK(ss.page(1).dim(0, k) == h.dim(k));
    for (int r = 1; r <= 5; ++r) CHECK(ss.page(r).differentials_vanish());
    auto report = ss.converge();
    CHECK(report.r_stop == 1);
    CHECK(report.certified);
    for (int k : c.degrees()) CHECK(report.e_infinity[{0, k}] == h.dim(k));
}

TEST_CASE("two-step filtration of the interval") {
    auto c = interval(Q);
    // span(v0) alone is not closed under the differential.
    CHECK_THROWS_AS(FilteredComplex(c, {{{0, SparseMatrix::column_vector(Q, {1, 0})}}}), InvariantError);
    FilteredComplex fc(c, {{{0, SparseMatrix::column_vector(Q, {1, 0})}, {1, SparseMatrix::identity(Q, 1)}}});
    SpectralSequence ss(fc);
    const auto& e0 = ss.page(0);
    CHECK(e0.dim(0, 0) == 1);
    CHECK(e0.dim(1, -1) == 1);
    CHECK(e0.dim(1, 0) == 1);
    CHECK(e0.flagged.size() == 1);
    const auto& e1 = ss.page(1);
    CHECK(e1.total_dims() == Dims{{0, 1}});
    CHECK(e1.dim(0, 0) == 1);
    auto report = ss.converge();
    CHECK(report.certified);
    CHECK(report.e_infinity_totals[0] == 1);
    CHECK(report.e_infinity_totals[1] == 0);
}

TEST_CASE("filtration guards") {
    auto c = interval(Q);
    // Not decreasing: F_2 bigger than F_1.
    CHECK_THROWS_AS(FilteredComplex(c, {{{1, SparseMatrix::identity(Q, 1)}},
                                        {{0, SparseMatrix::identity(Q, 2)}, {1, SparseMatrix::identity(Q, 1)}}}),
                    InvariantError);
    GradedBasis b({{"x", 0}, {"y", 1}});
    CochainComplex pair(Q, b, {{0, SparseMatrix::from_ints(Q, {{1}})}});
    CHECK_THROWS_AS(SplitFilteredComplex(pair, {1, 0}), InvariantError);
    CHECK_NOTHROW(SplitFilteredComplex(pair, {0, 1}));
}

TEST_CASE("Hopf model: d_2 of rank one and totals of S^3") {
    auto s = hopf(Q);
    SpectralSequence ss(s.to_filtered());
    const auto& e2 = ss.page(2);
    CHECK(e2.dim(0, 1) == 1);
    CHECK(e2.dim(2, 0) == 1);
    CHECK(mat_rank(e2.differential(0, 1)) == 1);
    CHECK(ss.page(3).total_dims() == Dims{{0, 1}, {3, 1}});
    auto report = ss.converge();
    CHECK(report.certified);
    CHECK(report.r_stop == 3);
    CHECK(report.cohomology_dims == Dims{{0, 1}, {1, 0}, {2, 0}, {3, 1}});

    // α = fiber 1-cocycle over the minimum: β has nothing to live in, so
    // d_2[α] = ∂_2 α = M*f0.
    auto z = zigzag_class_and_d(s, 2, basis_vector(Q, 4, 1));
    REQUIRE(z);
    CHECK(z->image == basis_vector(Q, 4, 2));
    CHECK(z->betas.size() == 1);
    CHECK(z->betas[0].is_zero());
}

TEST_CASE("zig-zag examples") {
    std::mt19937_64 rng(12);
    // ∂ = ∂_0 only: every ∂_0-cocycle lifts with β = 0 and d_r = 0.
    testing::SplitOptions o;
    o.generators = 14;
    o.length = 3;
    auto s = testing::random_split_complex(rng, F3, o);
    auto d0 = s.component(0);
    CochainComplex only(s.field(), s.complex().basis(), {});
    auto blocky = CochainComplex::from_global(s.field(), s.complex().basis(), d0);
    SplitFilteredComplex flat(blocky, s.blocks(), s.length());
    for (std::size_t g = 0; g < blocky.basis().size(); ++g) {
        auto alpha = basis_vector(F3, blocky.basis().size(), g);
        if (!(d0 * alpha).is_zero()) continue;
        for (int r = 1; r <= 4; ++r) {
            auto z = zigzag_class_and_d(flat, r, alpha);
            REQUIRE(z);
            CHECK(z->image.is_zero());
            for (auto& b : z->betas) CHECK(b.is_zero());
        }
    }

    // r = 1: lifts iff ∂_0 α = 0, and the image is ∂_1 α.
    auto d1 = s.component(1);
    for (std::size_t g = 0; g < s.complex().basis().size(); ++g) {
        auto alpha = basis_vector(F3, s.complex().basis().size(), g);
        auto z = zigzag_class_and_d(s, 1, alpha);
        CHECK(z.has_value() == (d0 * alpha).is_zero());
        if (z) CHECK(z->image == d1 * alpha);
    }

    auto two_blocks = basis_vector(F3, 4, 0) + basis_vector(F3, 4, 2);
    CHECK_THROWS_AS(zigzag_class_and_d(hopf(F3), 1, two_blocks), PreconditionError);
    CHECK_THROWS_AS(zigzag_class_and_d(hopf(F3), 1, SparseMatrix(F3, 4, 1)), PreconditionError);
}

TEST_CASE("random towers satisfy the structural invariants") {
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 60; ++trial) {
        FieldSpec field = trial % 3 == 0 ? F2 : (trial % 3 == 1 ? F3 : Q);
        testing::SplitOptions o;
        o.generators = 4 + trial % 20;
        o.length = 1 + trial % 5;
        o.min_degree = -1;
        o.max_degree = 3;
        auto s = testing::random_split_complex(rng, field, o);
        auto violations = testing::tower_violations(s, rng);
        CHECK_MESSAGE(violations.empty(), (violations.empty() ? "" : violations.front()));
    }
}

TEST_CASE("general filtrations agree with the split path") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 25; ++trial) {
        FieldSpec field = trial % 2 ? F3 : Q;
        testing::SplitOptions o;
        o.generators = 6 + trial % 10;
        o.length = 1 + trial % 4;
        auto s = testing::random_split_complex(rng, field, o);
        SpectralSequence split(s.to_filtered());
        SpectralSequence general(twisted(s, rng));
        for (int r = 0; r <= s.length() + 1; ++r) {
            const auto& a = split.page(r);
            const auto& b = general.page(r);
            CHECK(a.entries.size() == b.entries.size());
            for (const auto& [at, e] : a.entries) CHECK(b.dim(at) == e.dim);
        }
        CHECK(general.converge().certified);
    }
}

TEST_CASE("pages are deterministic") {
    std::mt19937_64 a(9), b(9);
    testing::SplitOptions o;
    o.generators = 20;
    o.length = 3;
    auto s1 = testing::random_split_complex(a, Q, o);
    auto s2 = testing::random_split_complex(b, Q, o);
    SpectralSequence x(s1.to_filtered()), y(s2.to_filtered());
    for (int r = 0; r <= 4; ++r)
        for (const auto& [at, e] : x.page(r).entries) CHECK(y.page(r).entries.at(at).representatives == e.representatives);
}

TEST_CASE("morphisms: identity, inclusion of F_1, and guards") {
    std::mt19937_64 rng(55);
    testing::SplitOptions o;
    o.generators = 16;
    o.length = 3;
    auto s = testing::random_split_complex(rng, Q, o);
    auto fc = s.to_filtered();
    const auto& c = s.complex();

    auto id = map_of_spectral_sequences(ChainMap::identity(c), fc, fc);
    for (const auto& [r, maps] : id.pages)
        for (const auto& [at, m] : maps) CHECK(m == SparseMatrix::identity(Q, m.cols()));

    // F_1C as a complex of its own, with the induced filtration.
    std::vector<std::size_t> keep;
    std::vector<Generator> gens;
    std::vector<int> levels;
    for (std::size_t i = 0; i < c.basis().size(); ++i)
        if (s.blocks()[i] >= 1) {
            keep.push_back(i);
            gens.push_back(c.basis()[i]);
            levels.push_back(s.blocks()[i]);
        }
    auto sub = CochainComplex::from_global(Q, GradedBasis(gens), c.global_differential().select_rows(keep).select_columns(keep));
    std::map<int, SparseMatrix> blocks;
    for (int k : c.degrees()) {
        std::vector<SparseMatrix::Entry> e;
        const auto& src = sub.basis().in_degree(k);
        for (std::size_t j = 0; j < src.size(); ++j)
            e.push_back({c.basis().local_index(keep[src[j]]), j, Scalar::from_int(Q, 1)});
        blocks.emplace(k, SparseMatrix::from_entries(Q, c.dim(k), sub.dim(k), e));
    }
    ChainMap inc(sub, c, blocks);
    auto sub_fc = FilteredComplex::from_levels(sub, levels, s.length());
    auto m = map_of_spectral_sequences(inc, sub_fc, fc);
    SpectralSequence target(fc);
    for (const auto& [at, e] : target.page(0).entries) {
        auto it = m.pages.at(0).find(at);
        REQUIRE(it != m.pages.at(0).end());
        if (at.p >= 1)
            CHECK(it->second == SparseMatrix::identity(Q, e.dim));
        else
            CHECK(it->second.cols() == 0);
    }

    auto flat = FilteredComplex::from_levels(c, std::vector<int>(c.basis().size(), 0), s.length());
    CHECK_THROWS_AS(map_of_spectral_sequences(ChainMap::identity(c), fc, flat), PreconditionError);
}
