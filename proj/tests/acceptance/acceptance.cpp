// Acceptance run: one PASS/FAIL line per criterion, each with a pinned time
// limit. Usage: acceptance [CLI GOLDEN_DIR]

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "fibss/localsys.hpp"
#include "fibss/morsefib.hpp"
#include "support/checks.hpp"
#include "support/fibrations.hpp"
#include "support/golden.hpp"
#include "support/models.hpp"

using namespace fibss;
using namespace fibss::testing;

namespace {

const FieldSpec Q = FieldSpec::rationals();
const FieldSpec F2 = FieldSpec::prime(2);
const FieldSpec F3 = FieldSpec::prime(3);

using Dims = std::map<Bidegree, std::size_t>;

/// Collects failures of one criterion; `detail` is the summary printed on
/// its line.
struct Outcome {
    std::vector<std::string> failures;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

FieldSpec cycle_field(int i) { return i % 3 == 0 ? F2 : (i % 3 == 1 ? F3 : Q); }

Dims page_dims(SpectralSequence& ss, int r) {
    Dims out;
    for (const auto& [b, e] : ss.page(r).entries)
        if (e.dim > 0) out[b] = e.dim;
    return out;
}

std::string str(const Dims& d) {
    std::ostringstream out;
    out << "{";
    for (const auto& [b, n] : d) out << " (" << b.p << "," << b.q << "):" << n;
    out << " }";
    return out.str();
}

std::string str(const std::map<int, std::size_t>& d) {
    std::ostringstream out;
    out << "(";
    bool first = true;
    for (const auto& [k, n] : d) {
        out << (first ? "" : ",") << n;
        first = false;
    }
    out << ")";
    return out.str();
}

// 1. Structural invariants of random towers.
Outcome soundness() {
    Outcome o;
    std::mt19937_64 rng(20240501);
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        SplitOptions opt;
        opt.generators = 4 + static_cast<std::size_t>(t % 27);
        opt.length = 1 + t % 5;
        opt.min_degree = -1;
        opt.max_degree = 3;
        opt.mixing = 0.5 + (t % 4) * 0.5;
        auto fc = random_split_complex(rng, cycle_field(t), opt);
        for (const auto& v : tower_violations(fc, rng)) o.failures.push_back("tower " + std::to_string(t) + ": " + v);
    }
    o.detail = std::to_string(trials) + " towers, <= 30 generators, length <= 5, F2/F3/Q";
    return o;
}

// 2. Product fibrations: E_2 = H(B) ⊗ H(F) and no higher differentials.
Outcome products() {
    Outcome o;
    std::mt19937_64 rng(31337);
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        auto field = cycle_field(t);
        auto base = random_complex(rng, field, 3 + t % 5, 0, 2);
        auto fiber = random_complex(rng, field, 2 + t % 5, 0, 3);
        auto fd = product_fibration(base, fiber);
        Dims expected;
        for (auto [p, a] : cohomology(base).dims)
            for (auto [q, b] : cohomology(fiber).dims)
                if (a * b > 0) expected[{p, q}] = a * b;
        auto total = assemble_fibration(fd);
        SpectralSequence ss(total.to_filtered());
        auto e2 = page_dims(ss, 2);
        o.expect(e2 == expected, "product " + std::to_string(t) + ": E_2 " + str(e2) + " != " + str(expected));
        for (int r = 2; r <= total.length() + 1; ++r)
            o.expect(ss.page(r).differentials_vanish(),
                     "product " + std::to_string(t) + ": d_" + std::to_string(r) + " != 0");
        o.expect(ss.converge().certified, "product " + std::to_string(t) + ": not certified");
    }
    o.detail = std::to_string(trials) + " products";
    return o;
}

// 3. Acyclic fibers: everything from E_2 on vanishes, and so does H(E).
Outcome acyclic() {
    Outcome o;
    std::mt19937_64 rng(4242);
    const int trials = 24;
    for (int t = 0; t < trials; ++t) {
        auto fiber = random_fiber(rng, cycle_field(t), 4 + 2 * static_cast<std::size_t>(t % 3), 2, true);
        auto fd = t % 2 ? random_torus_fibration(rng, fiber) : random_graph_fibration(rng, fiber);
        auto total = assemble_fibration(fd);
        SpectralSequence ss(total.to_filtered());
        for (int r = 2; r <= total.length() + 2; ++r) {
            auto d = page_dims(ss, r);
            o.expect(d.empty(), "acyclic " + std::to_string(t) + ": E_" + std::to_string(r) + " = " + str(d));
        }
        for (auto [k, d] : cohomology(total.complex()).dims)
            o.expect(d == 0, "acyclic " + std::to_string(t) + ": H^" + std::to_string(k) + " != 0");
    }
    o.detail = std::to_string(trials) + " fibrations";
    return o;
}

bool nontrivial(const E2Table& t) {
    for (const auto& [q, ls] : t.coefficient_systems)
        for (const auto& m : ls.transports())
            if (!(m == SparseMatrix::identity(ls.field(), ls.rank()))) return true;
    return false;
}

// 4. E_2 through the Morse complex of H^q(F) against page 2 of the tower.
Outcome e2_identification() {
    Outcome o;
    std::mt19937_64 rng(777);
    int cases = 0, attempts = 0;
    while (cases < 60 && attempts < 600) {
        ++attempts;
        auto fiber = random_fiber(rng, cycle_field(attempts), 4 + static_cast<std::size_t>(attempts % 4), 2, false);
        auto fd = attempts % 2 ? random_torus_fibration(rng, fiber) : random_graph_fibration(rng, fiber);
        auto table = e2_table(fd);
        if (!nontrivial(table)) continue;
        ++cases;
        SpectralSequence ss(assemble_fibration(fd).to_filtered());
        auto e2 = page_dims(ss, 2);
        o.expect(e2 == table.dims, "case " + std::to_string(cases) + ": page 2 " + str(e2) + " != " + str(table.dims));
    }
    o.expect(cases >= 50, "only " + std::to_string(cases) + " nontrivial cases generated");
    o.detail = std::to_string(cases) + " fibrations with nontrivial monodromy on cohomology";
    return o;
}

// 5. Torus and Klein bottle: fibration tower against the cellular tower.
Outcome torus_klein() {
    Outcome o;
    const std::map<std::pair<std::string, std::string>, std::map<int, std::size_t>> expected = {
        {{"torus", "Q"}, {{0, 1}, {1, 2}, {2, 1}}},
        {{"torus", "F2"}, {{0, 1}, {1, 2}, {2, 1}}},
        {{"klein", "Q"}, {{0, 1}, {1, 1}, {2, 0}}},
        {{"klein", "F2"}, {{0, 1}, {1, 2}, {2, 1}}},
    };
    std::string summary;
    for (auto [name, flip] : {std::pair<std::string, int>{"torus", 1}, {"klein", -1}}) {
        for (auto field : {Q, F2}) {
            auto label = name + "/" + field.name();
            auto fd = circle_bundle(field, flip);
            auto cmp = leray_serre_compare(circle_bundle_cells(flip), fd);
            o.expect(cmp.agree, label + ": towers differ");
            for (const auto& d : cmp.differences) o.failures.push_back(label + ": " + d);
            auto h = cohomology(assemble_fibration(fd).complex()).dims;
            for (int k = 0; k <= 2; ++k) h.try_emplace(k, 0);
            o.expect(h == expected.at({name, field.name()}), label + ": totals " + str(h));
            if (name == "klein") summary += " klein " + field.name() + " " + str(h);
        }
    }
    o.detail = "pages 2.." + std::to_string(circle_base().max_index() + 1) + " equal;" + summary;
    return o;
}

// 6. Hopf model.
Outcome hopf() {
    Outcome o;
    auto total = assemble_fibration(hopf_fibration(Q));
    SpectralSequence ss(total.to_filtered());
    auto rank = mat_rank(ss.page(2).differential(0, 1));
    o.expect(rank == 1, "rank d_2 (0,1) -> (2,0) = " + std::to_string(rank));
    auto rep = ss.converge();
    o.expect(rep.certified, "not certified");
    o.expect(page_dims(ss, 3) == page_dims(ss, total.length() + 1), "E_3 != E_inf");
    o.expect(ss.page(3).differentials_vanish(), "d_3 != 0");
    auto h = cohomology(total.complex()).dims;
    const std::map<int, std::size_t> want{{0, 1}, {1, 0}, {2, 0}, {3, 1}};
    o.expect(h == want, "H " + str(h));
    std::map<int, std::size_t> einf = rep.e_infinity_totals;
    for (int k = 0; k <= 3; ++k) einf.try_emplace(k, 0);
    o.expect(einf == want, "E_inf totals " + str(einf));
    o.detail = "rank d_2 " + std::to_string(rank) + ", totals " + str(einf);
    return o;
}

SparseMatrix random_invertible(std::mt19937_64& rng, FieldSpec f, std::size_t n) {
    std::uniform_int_distribution<long long> v(-2, 2);
    while (true) {
        std::vector<std::vector<long long>> d(n, std::vector<long long>(n));
        for (auto& row : d)
            for (auto& x : row) x = v(rng);
        auto m = SparseMatrix::from_ints(f, d);
        if (mat_rank(m) == n) return m;
    }
}

EdgePath random_path(std::mt19937_64& rng, const BaseGraph& g, std::size_t start, int length) {
    EdgePath p{start, {}};
    auto at = start;
    for (int i = 0; i < length; ++i) {
        std::vector<Step> options;
        for (std::size_t e = 0; e < g.edges().size(); ++e) {
            if (g.source(e) == at) options.push_back({e, false});
            if (g.target(e) == at) options.push_back({e, true});
        }
        auto s = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
        p.steps.push_back(s);
        at = s.inverse ? g.source(s.edge) : g.target(s.edge);
    }
    return p;
}

LocalSubsystem restrict_to(const LocalSystem& ls, std::vector<std::size_t> carrier,
                           const std::vector<std::string>& words) {
    std::vector<EdgePath> paths;
    std::vector<SparseMatrix> t;
    for (const auto& w : words) {
        paths.push_back(ls.base().parse_path(w));
        t.push_back(transport(ls, paths.back()));
    }
    return LocalSubsystem(ls.base(), ls.field(), ls.rank(), std::move(carrier), std::move(paths), std::move(t));
}

// 7. Local systems: homotopy invariance, groupoid law, base-point
// conjugacy, unique extension.
Outcome local_systems() {
    Outcome o;
    std::mt19937_64 rng(99);
    const BaseGraph torus({"x"}, {{"a", "x", "x"}, {"b", "x", "x"}}, {"a b a^-1 b^-1"});
    const BaseGraph wedge({"x", "y", "z"}, {{"t1", "x", "y"}, {"a1", "y", "x"}, {"t2", "x", "z"}, {"b1", "z", "x"}});
    int checks = 0;

    // Homotopy invariance: inserting a relator or a backtrack anywhere in a
    // path leaves the transport unchanged; a system violating the relation is
    // caught with the offending word.
    for (int t = 0; t < 20; ++t) {
        auto field = t % 2 ? F3 : Q;
        auto m = random_invertible(rng, field, 2);
        LocalSystem ls(torus, field, 2, {m, m * m * m});
        o.expect(check_homotopy_invariance(ls).ok, "commuting torus system rejected");
        auto p = random_path(rng, torus, 0, 6);
        auto relator = torus.parse_path("a b a^-1 b^-1");
        for (std::size_t cut = 0; cut <= p.steps.size(); ++cut) {
            EdgePath q{0, {p.steps.begin(), p.steps.begin() + static_cast<long>(cut)}};
            q.steps.insert(q.steps.end(), relator.steps.begin(), relator.steps.end());
            q.steps.push_back({1, false});
            q.steps.push_back({1, true});
            q.steps.insert(q.steps.end(), p.steps.begin() + static_cast<long>(cut), p.steps.end());
            o.expect(transport(ls, q) == transport(ls, p), "homotopic paths transport differently");
            ++checks;
        }
    }
    {
        auto a = SparseMatrix::from_ints(F3, {{1, 1}, {0, 1}});
        auto b = SparseMatrix::from_ints(F3, {{1, 0}, {1, 1}});
        auto res = check_homotopy_invariance(LocalSystem::unchecked(torus, F3, 2, {a, b}));
        o.expect(!res.ok && res.word == "a b a^-1 b^-1", "non-commuting torus system accepted");
        ++checks;
    }

    // Groupoid law.
    for (int t = 0; t < 40; ++t) {
        std::vector<SparseMatrix> tr;
        for (std::size_t e = 0; e < wedge.edges().size(); ++e) tr.push_back(random_invertible(rng, Q, 3));
        LocalSystem ls(wedge, Q, 3, tr);
        auto v = random_path(rng, wedge, static_cast<std::size_t>(t % 3), t % 7);
        auto w = random_path(rng, wedge, wedge.end_of(v), (t * 5) % 6);
        o.expect(transport(ls, wedge.concat(v, w)) == transport(ls, w) * transport(ls, v), "Φ_{vw} != Φ_w Φ_v");
        o.expect(transport(ls, wedge.inverse(v)) == mat_inverse(transport(ls, v)), "Φ_{v^-1} != Φ_v^-1");
        o.expect(transport(ls, EdgePath{wedge.end_of(v), {}}) == SparseMatrix::identity(Q, 3), "constant path");
        checks += 3;
    }

    // Base-point conjugacy and unique extension on the wedge.
    for (int t = 0; t < 15; ++t) {
        std::vector<SparseMatrix> tr;
        for (std::size_t e = 0; e < wedge.edges().size(); ++e) tr.push_back(random_invertible(rng, F3, 2));
        LocalSystem truth(wedge, F3, 2, tr);
        auto sub = restrict_to(truth, {0, 1, 2}, {"t1", "t2", "t1 a1", "t2 b1"});
        auto at_x = extend_subsystem(sub, {.base_point = 0});
        auto at_y = extend_subsystem(sub, {.base_point = 1});
        o.expect(at_x.verdict == Surjectivity::Yes && at_x.extension && *at_x.extension == truth,
                 "wedge extension is not the original system");
        o.expect(at_y.extension && at_x.extension && *at_y.extension == *at_x.extension,
                 "extension depends on the base point");
        if (!at_x.extension) continue;
        auto delta = wedge.parse_path("t1");
        auto phi = transport(truth, delta);
        for (std::size_t i = 0; i < at_y.base_generators.size(); ++i) {
            auto loop = wedge.concat(wedge.concat(delta, at_y.base_generators[i]), wedge.inverse(delta));
            o.expect(at_y.monodromy[i] == phi * transport(*at_x.extension, loop) * mat_inverse(phi),
                     "monodromy not conjugate under change of base point");
        }
        checks += 3;
    }

    // Unique extension on the torus presentation from several generating sets.
    for (int t = 0; t < 10; ++t) {
        auto m = random_invertible(rng, Q, 2);
        LocalSystem truth(torus, Q, 2, {m * m, m * m * m});
        for (auto words : {std::vector<std::string>{"a", "b"}, {"a b", "b"}, {"b a", "a^-1"}}) {
            auto rep = extend_subsystem(restrict_to(truth, {0}, words));
            o.expect(rep.verdict == Surjectivity::Yes && rep.extension && *rep.extension == truth,
                     "torus extension from " + words[0] + ", " + words[1]);
            ++checks;
        }
        // Loops of index two do not generate π_1 here; the bounded search
        // must not claim they do.
        auto half = extend_subsystem(restrict_to(truth, {0}, {"a a", "b"}), {.max_word_depth = 3});
        o.expect(half.verdict != Surjectivity::Yes && !half.extension, "index-two subgroup reported surjective");
        ++checks;
    }
    o.detail = std::to_string(checks) + " checks";
    return o;
}

SparseMatrix entry_or_zero(const std::map<Bidegree, SparseMatrix>& m, Bidegree b, std::size_t rows, std::size_t cols,
                           FieldSpec f) {
    auto it = m.find(b);
    return it == m.end() ? SparseMatrix(f, rows, cols) : it->second;
}

// 8. Truncation maps between action windows induce page maps that commute
// with every d_r and compose.
Outcome truncations() {
    Outcome o;
    std::mt19937_64 rng(8080);
    SplitOptions opt;
    opt.with_action = true;
    const int trials = 24;
    int squares = 0;
    for (int t = 0; t < trials; ++t) {
        opt.generators = 10 + static_cast<std::size_t>(t % 10);
        opt.length = 1 + t % 4;
        auto field = cycle_field(t);
        auto model = random_split_model(rng, field, opt);
        check_action(model.complex, model.action);
        std::uniform_int_distribution<long long> cut(0, 1000);
        long long a = cut(rng), b = cut(rng), c = cut(rng), d = cut(rng);
        ActionWindow small{std::min(a, b), std::max(a, b) + 1};
        ActionWindow big{0, small.hi + d / 3};
        big.lo = std::min(small.lo + c / 3, big.hi);
        ActionWindow mid{(small.lo + big.lo) / 2, (small.hi + big.hi) / 2};
        auto src = window_complex(model.complex, model.action, small);
        auto via = window_complex(model.complex, model.action, mid);
        auto dst = window_complex(model.complex, model.action, big);
        SpectralSequence s1(src.to_filtered()), s2(via.to_filtered()), s3(dst.to_filtered());
        auto f = truncation_map(model.complex, model.action, small, big);
        auto f1 = truncation_map(model.complex, model.action, small, mid);
        auto f2 = truncation_map(model.complex, model.action, mid, big);
        SpectralSequenceMorphism m, m1, m2;
        try {
            m = map_of_spectral_sequences(f, s1, s3);
            m1 = map_of_spectral_sequences(f1, s1, s2);
            m2 = map_of_spectral_sequences(f2, s2, s3);
        } catch (const std::exception& e) {
            o.failures.push_back("instance " + std::to_string(t) + ": " + e.what());
            continue;
        }
        for (int r = 0; r <= m.last_page; ++r) {
            const auto& ps = s1.page(r);
            const auto& pt = s3.page(r);
            const auto& pv = s2.page(r);
            std::set<Bidegree> at;
            for (const auto& [b0, e] : ps.entries) at.insert(b0);
            for (const auto& [b0, e] : pt.entries) at.insert(b0);
            for (auto b0 : at) {
                Bidegree b1{b0.p + r, b0.q - r + 1};
                auto fs = entry_or_zero(m.pages[r], b0, pt.dim(b0), ps.dim(b0), field);
                auto ft = entry_or_zero(m.pages[r], b1, pt.dim(b1), ps.dim(b1), field);
                if (r >= 1) {
                    auto lhs = ft * ps.differential(b0.p, b0.q);
                    auto rhs = pt.differential(b0.p, b0.q) * fs;
                    o.expect(lhs == rhs, "instance " + std::to_string(t) + ": square fails at r = " + std::to_string(r));
                    ++squares;
                }
                auto g1 = entry_or_zero(m1.pages[r], b0, pv.dim(b0), ps.dim(b0), field);
                auto g2 = entry_or_zero(m2.pages[r], b0, pt.dim(b0), pv.dim(b0), field);
                o.expect(g2 * g1 == fs, "instance " + std::to_string(t) + ": page maps do not compose at r = " +
                                            std::to_string(r));
            }
        }
    }
    o.detail = std::to_string(trials) + " instances, " + std::to_string(squares) + " squares";
    return o;
}

// 9. Performance floor.
Outcome performance() {
    Outcome o;
    std::mt19937_64 rng(2000);
    SplitOptions opt;
    opt.generators = 2000;
    opt.length = 4;
    opt.min_degree = 0;
    opt.max_degree = 4;
    auto fc = random_split_complex(rng, F2, opt);
    SpectralSequence ss(fc.to_filtered());
    for (int r = 0; r <= fc.length() + 1; ++r) ss.page(r);
    auto rep = ss.converge();
    o.expect(rep.certified, "not certified");
    std::size_t total = 0;
    for (auto [k, d] : rep.cohomology_dims) total += d;
    o.detail = "2000 generators over F2, length 4, dim H = " + std::to_string(total);
    return o;
}

// 10. CLI golden corpus.
Outcome cli(const std::string& path, const std::string& dir) {
    Outcome o;
    auto res = run_golden(path, dir);
    o.failures = res.failures;
    o.detail = std::to_string(res.cases) + " cases, " + std::to_string(res.canon_checks) + " canon round-trips";
    return o;
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli_path = argc > 1 ? argv[1] : FIBSS_CLI_PATH;
    const std::string golden_dir = argc > 2 ? argv[2] : FIBSS_GOLDEN_DIR;
    struct Criterion {
        int id;
        std::string name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "spectral-sequence soundness", 60.0, soundness},
        {2, "product fibrations degenerate at E_2", 30.0, products},
        {3, "acyclic fiber kills E_2 onwards", 10.0, acyclic},
        {4, "E_2 from local coefficients", 30.0, e2_identification},
        {5, "torus and Klein bottle against cells", 5.0, torus_klein},
        {6, "Hopf d_2", 1.0, hopf},
        {7, "local-system suite", 5.0, local_systems},
        {8, "truncation functoriality", 10.0, truncations},
        {9, "performance floor", 10.0, performance},
        {10, "CLI contract", 60.0, [&] { return cli(cli_path, golden_dir); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.failures.push_back(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = secs < c.limit_seconds;
        bool ok = out.failures.empty() && in_time;
        if (!ok) ++failed;
        std::cout << "criterion " << c.id << " " << (ok ? "PASS" : "FAIL") << " " << c.name << ": " << out.detail
                  << " [" << std::fixed << std::setprecision(2) << secs << " s, limit " << std::setprecision(0)
                  << c.limit_seconds << " s]\n";
        if (!in_time) std::cout << "    over the time limit\n";
        for (std::size_t i = 0; i < out.failures.size() && i < 5; ++i) std::cout << "    " << out.failures[i] << "\n";
        if (out.failures.size() > 5) std::cout << "    ... " << out.failures.size() - 5 << " more\n";
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << "\n";
    return failed == 0 ? 0 : 1;
}
