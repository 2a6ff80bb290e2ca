#include <doctest.h>

#include <random>

#include "fibss/io.hpp"
#include "support/fibrations.hpp"
#include "support/models.hpp"

using namespace fibss;
using namespace fibss::testing;

namespace {

const FieldSpec Q = FieldSpec::rationals();
const FieldSpec F3 = FieldSpec::prime(3);

// print ∘ parse is the identity on printed text.
void check_round_trip(const io::Document& doc) {
    auto text = io::print_document(doc);
    auto again = io::print_document(io::parse_document(text));
    CHECK(again == text);
}

int exit_kind(const std::string& text) {
    try {
        io::parse_document(text);
        return 0;
    } catch (const ParseError&) {
        return 2;
    } catch (const InvariantError&) {
        return 3;
    }
}

} // namespace

TEST_CASE("round trip of fixed models") {
    for (auto field : {Q, F3}) {
        check_round_trip(circle_fiber(field));
        check_round_trip(circle_bundle(field, -1));
        check_round_trip(hopf_fibration(field));
        check_round_trip(compose_model(field).system.fiber());
    }
    auto cells = circle_bundle_cells(-1);
    check_round_trip(io::CellularDoc{cells, LocalSystem::trivial(cells.base(), Q, 1)});
    auto base = circle_base();
    check_round_trip(io::MorseDoc{base, LocalSystem(base.base(), Q, 1, {SparseMatrix::identity(Q, 1),
                                                                       SparseMatrix::from_ints(Q, {{-1}})})});
    check_round_trip(base.base());
}

TEST_CASE("round trip of random documents") {
    std::mt19937_64 rng(3);
    SplitOptions o;
    o.generators = 12;
    o.with_action = true;
    for (int trial = 0; trial < 10; ++trial) {
        auto field = trial % 2 ? F3 : Q;
        auto model = random_split_model(rng, field, o);
        check_round_trip(io::SplitDoc{model.complex, model.action});
        check_round_trip(model.complex.to_filtered());
        auto fiber = random_fiber(rng, field, 4, 2, false);
        check_round_trip(random_graph_fibration(rng, fiber));
        check_round_trip(random_torus_fibration(rng, fiber));
    }
}

TEST_CASE("rationals print as integers or a/b") {
    auto text = R"({"kind": "complex", "field": "Q",
        "generators": [{"id": "x", "degree": 0}, {"id": "y", "degree": 1}],
        "differential": [["x", "y", "6/4"]]})";
    auto printed = io::print_document(io::parse_document(text));
    CHECK(printed.find("\"3/2\"") != std::string::npos);
    auto f3 = R"({"kind": "complex", "field": "F3",
        "generators": [{"id": "x", "degree": 0}, {"id": "y", "degree": 1}],
        "differential": [["x", "y", -1]]})";
    CHECK(io::print_document(io::parse_document(f3)).find("[\"x\", \"y\", 2]") != std::string::npos);
}

TEST_CASE("errors are classified") {
    CHECK(exit_kind("{") == 2);
    CHECK(exit_kind(R"({"kind": "nonsense"})") == 2);
    CHECK(exit_kind(R"({"kind": "complex", "field": "F4", "generators": [], "differential": []})") == 2);
    CHECK(exit_kind(R"({"kind": "complex", "field": "Q",
        "generators": [{"id": "x", "degree": 0}, {"id": "y", "degree": 1}, {"id": "z", "degree": 2}],
        "differential": [["x", "y", 1], ["y", "z", 1]]})") == 3);
    try {
        io::parse_document("{\n  \"kind\": \"complex\",\n  \"field\": \"Q\" \"x\"\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).starts_with("line 3, column"));
    }
}
