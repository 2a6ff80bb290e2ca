#include <doctest.h>

#include <algorithm>
#include <random>

#include "fibss/chaincore.hpp"
#include "support/models.hpp"

using namespace fibss;

namespace {

const FieldSpec Q = FieldSpec::rationals();
const FieldSpec F2 = FieldSpec::prime(2);

CochainComplex zero_complex(FieldSpec f, std::vector<std::pair<std::string, int>> gens) {
    std::vector<Generator> g;
    for (auto& [id, k] : gens) g.push_back({id, k});
    return CochainComplex(f, GradedBasis(g), {});
}

CochainComplex circle(FieldSpec f) { return zero_complex(f, {{"v", 0}, {"e", 1}}); }

// Two 0-cells and one 1-cell; δv0 = -e, δv1 = e.
CochainComplex interval(FieldSpec f) {
    GradedBasis b({{"v0", 0}, {"v1", 0}, {"e", 1}});
    return CochainComplex(f, b, {{0, SparseMatrix::from_ints(f, {{-1, 1}})}});
}

CochainComplex acyclic_pair(FieldSpec f) {
    GradedBasis b({{"x", 0}, {"y", 1}});
    return CochainComplex(f, b, {{0, SparseMatrix::from_ints(f, {{1}})}});
}

std::vector<std::size_t> dims_of(const CohomologyResult& h, int lo, int hi) {
    std::vector<std::size_t> out;
    for (int k = lo; k <= hi; ++k) out.push_back(h.dim(k));
    return out;
}

using Dims = std::vector<std::size_t>;

} // namespace

TEST_CASE("cohomology examples") {
    auto z = zero_complex(Q, {{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}, {"e", 1}});
    CHECK(dims_of(cohomology(z), 0, 1) == Dims{2, 3});
    CHECK(dims_of(cohomology(circle(Q)), 0, 1) == Dims{1, 1});
    CHECK(dims_of(cohomology(interval(Q)), 0, 1) == Dims{1, 0});
}

TEST_CASE("complex construction guards") {
    GradedBasis b({{"x", 0}, {"y", 1}, {"z", 2}});
    auto one = SparseMatrix::from_ints(Q, {{1}});
    CHECK_THROWS_AS(CochainComplex(Q, b, {{0, one}, {1, one}}), InvariantError);
    CHECK_THROWS_AS(CochainComplex(Q, b, {{0, SparseMatrix::from_ints(Q, {{1, 1}})}}), DimensionError);
    CHECK_THROWS_AS(GradedBasis({{"x", 0}, {"x", 1}}), InvariantError);
    auto bad = SparseMatrix::from_ints(Q, {{0, 0, 1}, {0, 0, 0}, {0, 0, 0}});
    CHECK_THROWS_AS(CochainComplex::from_global(Q, b, bad), InvariantError);
}

TEST_CASE("representatives are independent cocycles") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto c = testing::random_complex(rng, trial % 2 ? Q : F2, 14, -1, 2);
        auto h = cohomology(c);
        for (int k : c.degrees()) {
            const auto& reps = h.representatives.at(k);
            CHECK((c.d(k) * reps).is_zero());
            CHECK(mat_rank(hstack({reps, h.boundaries.at(k)})) == reps.cols() + h.boundaries.at(k).cols());
        }
    }
}

TEST_CASE("tensor product examples") {
    auto unit = zero_complex(Q, {{"1", 0}});
    auto i = interval(Q);
    auto iu = tensor_product(i, unit);
    CHECK(iu.global_differential() == i.global_differential());
    CHECK(dims_of(cohomology(iu), 0, 1) == dims_of(cohomology(i), 0, 1));

    auto torus = tensor_product(circle(Q), circle(Q));
    CHECK(torus.basis().size() == 4);
    CHECK(dims_of(cohomology(torus), 0, 2) == Dims{1, 2, 1});

    auto dead = tensor_product(acyclic_pair(Q), circle(Q));
    CHECK(dims_of(cohomology(dead), 0, 2) == Dims{0, 0, 0});

    CHECK_THROWS_AS(tensor_product(circle(Q), circle(F2)), DimensionError);
}

TEST_CASE("induced maps: identity and zero") {
    auto c = interval(Q);
    auto id = induced_map_on_cohomology(ChainMap::identity(c));
    CHECK(id.at(0) == SparseMatrix::identity(Q, 1));
    CHECK(id.at(1).rows() == 0);
    auto zero = induced_map_on_cohomology(ChainMap::zero(circle(Q), circle(Q)));
    for (auto& [k, m] : zero) CHECK(m.is_zero());
    CHECK(zero.at(0).rows() == 1);
}

TEST_CASE("inclusion with acyclic quotient is an isomorphism") {
    // C' = interval; C adds x (degree 0), y (degree 1) with δx = y + e.
    auto sub = interval(Q);
    GradedBasis b({{"v0", 0}, {"v1", 0}, {"x", 0}, {"e", 1}, {"y", 1}});
    auto big = CochainComplex(Q, b, {{0, SparseMatrix::from_ints(Q, {{-1, 1, 1}, {0, 0, 1}})}});
    CHECK(dims_of(cohomology(big), 0, 1) == dims_of(cohomology(sub), 0, 1));
    ChainMap inc(sub, big,
                 {{0, SparseMatrix::from_ints(Q, {{1, 0}, {0, 1}, {0, 0}})},
                  {1, SparseMatrix::from_ints(Q, {{1}, {0}})}});
    auto h = induced_map_on_cohomology(inc);
    CHECK(h.at(0).rows() == 1);
    CHECK(mat_rank(h.at(0)) == 1);
    CHECK(h.at(1).rows() == 0);

    CHECK_THROWS_AS(ChainMap(sub, big, {{0, SparseMatrix::from_ints(Q, {{1, 0}, {0, 1}, {0, 0}})}}), InvariantError);
}

TEST_CASE("induced map ignores the choice of representative") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        auto field = trial % 2 ? Q : FieldSpec::prime(3);
        auto c = testing::random_complex(rng, field, 12, 0, 2);
        auto h = cohomology(c);
        // Multiplication by a unit is a chain map; perturb representatives by coboundaries.
        auto s = testing::random_unit(rng, field);
        std::map<int, SparseMatrix> blocks;
        for (int k : c.degrees()) blocks.emplace(k, SparseMatrix::identity(field, c.dim(k)).scaled(s));
        ChainMap f(c, c, blocks);
        auto induced = induced_map_on_cohomology(f);
        for (int k : c.degrees()) {
            const auto& reps = h.representatives.at(k);
            if (reps.cols() == 0) continue;
            std::vector<SparseMatrix::Entry> w;
            std::uniform_int_distribution<std::size_t> row(0, std::max<std::size_t>(c.dim(k - 1), 1) - 1);
            for (std::size_t j = 0; j < reps.cols() && c.dim(k - 1) > 0; ++j)
                w.push_back({row(rng), j, testing::random_unit(rng, field)});
            auto shift = SparseMatrix::from_entries(field, c.dim(k - 1), reps.cols(), w);
            auto perturbed = reps + c.d(k - 1) * shift;
            auto coords = class_coordinates(h, k, f.block(k) * perturbed);
            CHECK(coords == induced.at(k));
        }
    }
}

TEST_CASE("euler characteristic, permutation invariance and Kunneth") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 40; ++trial) {
        auto field = trial % 3 == 0 ? Q : FieldSpec::prime(trial % 3 == 1 ? 2 : 3);
        auto a = testing::random_complex(rng, field, 1 + trial % 9, -1, 2);
        auto b = testing::random_complex(rng, field, 1 + (trial * 7) % 8, 0, 2);
        auto ha = cohomology(a);
        auto hb = cohomology(b);
        CHECK(euler_characteristic(a) == ha.euler_characteristic());

        std::vector<std::size_t> order(a.basis().size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        CHECK(cohomology(testing::permuted(a, order)).dims == ha.dims);

        auto ab = tensor_product(a, b);
        auto hab = cohomology(ab);
        CHECK(euler_characteristic(ab) == hab.euler_characteristic());
        for (int k = -2; k <= 5; ++k) {
            std::size_t expected = 0;
            for (auto& [i, di] : ha.dims) expected += di * hb.dim(k - i);
            CHECK(hab.dim(k) == expected);
        }
    }
}
