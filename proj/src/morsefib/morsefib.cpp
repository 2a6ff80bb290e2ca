#include "fibss/morsefib.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <unordered_map>

namespace fibss {

namespace {

using Entry = SparseMatrix::Entry;

// First nonzero entry (row, col) of d∘d, if any.
std::optional<std::pair<std::size_t, std::size_t>> square_defect(const SparseMatrix& d) {
    auto dd = d * d;
    if (dd.is_zero()) return std::nullopt;
    auto e = dd.entries().front();
    return std::make_pair(e.row, e.col);
}

void add_block(std::vector<Entry>& out, const SparseMatrix& block, std::size_t row0, std::size_t col0,
               const Scalar& factor) {
    for (const auto& e : block.entries()) out.push_back({row0 + e.row, col0 + e.col, e.value * factor});
}

void check_word(const BaseGraph& base, const EdgePath& word, std::size_t from, std::size_t to,
                const std::string& what) {
    if (word.start != from) throw InvariantError(what + ": word does not start at the source vertex");
    std::size_t end;
    try {
        end = base.end_of(word);
    } catch (const PreconditionError& err) {
        throw InvariantError(what + ": " + err.what());
    }
    if (end != to) throw InvariantError(what + ": word does not end at the target vertex");
}

// Free reduction of a closed or open step sequence.
std::vector<Step> reduce(const std::vector<Step>& steps) {
    std::vector<Step> out;
    for (const auto& s : steps) {
        if (!out.empty() && out.back().edge == s.edge && out.back().inverse != s.inverse)
            out.pop_back();
        else
            out.push_back(s);
    }
    return out;
}

std::vector<Step> cyclic_reduce(std::vector<Step> steps) {
    steps = reduce(steps);
    std::size_t a = 0, b = steps.size();
    while (b - a >= 2 && steps[a].edge == steps[b - 1].edge && steps[a].inverse != steps[b - 1].inverse) {
        ++a;
        --b;
    }
    return {steps.begin() + static_cast<std::ptrdiff_t>(a), steps.begin() + static_cast<std::ptrdiff_t>(b)};
}

std::vector<Step> invert_steps(const std::vector<Step>& steps) {
    std::vector<Step> out;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) out.push_back({it->edge, !it->inverse});
    return out;
}

bool cyclic_rotation_of(const std::vector<Step>& a, const std::vector<Step>& b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    for (std::size_t shift = 0; shift < a.size(); ++shift) {
        bool same = true;
        for (std::size_t i = 0; i < a.size() && same; ++i) same = a[(i + shift) % a.size()] == b[i];
        if (same) return true;
    }
    return false;
}

std::map<Bidegree, std::size_t> nonzero_dims(const Page& page) {
    std::map<Bidegree, std::size_t> out;
    for (const auto& [b, e] : page.entries)
        if (e.dim > 0) out[b] = e.dim;
    return out;
}

std::map<int, std::size_t> nonzero(const std::map<int, std::size_t>& dims) {
    std::map<int, std::size_t> out;
    for (auto [k, d] : dims)
        if (d > 0) out[k] = d;
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Morse data

MorseData::MorseData(BaseGraph base, std::vector<CriticalPoint> points, std::vector<Trajectory> trajectories)
    : base_(std::move(base)), points_(std::move(points)), trajectories_(std::move(trajectories)) {
    std::set<std::string> ids;
    for (const auto& x : points_) {
        if (!ids.insert(x.id).second) throw InvariantError("duplicate critical point '" + x.id + "'");
        if (x.index < 0) throw InvariantError("critical point '" + x.id + "' has a negative index");
        if (x.vertex >= base_.vertices().size())
            throw InvariantError("critical point '" + x.id + "' sits on an unknown vertex");
    }
    for (const auto& t : trajectories_) {
        const std::string what = "trajectory '" + t.id + "'";
        if (t.from >= points_.size() || t.to >= points_.size()) throw InvariantError(what + " has an unknown end");
        if (t.sign != 1 && t.sign != -1) throw InvariantError(what + " has a sign other than +1 or -1");
        if (points_[t.to].index <= points_[t.from].index)
            throw InvariantError(what + " does not raise the index");
        check_word(base_, t.word, points_[t.from].vertex, points_[t.to].vertex, what);
    }
}

std::optional<std::size_t> MorseData::point_index(const std::string& id) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (points_[i].id == id) return i;
    return std::nullopt;
}

int MorseData::max_index() const {
    int n = 0;
    for (const auto& x : points_) n = std::max(n, x.index);
    return n;
}

CochainComplex morse_complex(const MorseData& md, const LocalSystem& ls) {
    if (!(ls.base() == md.base())) throw PreconditionError("local system lives on a different base graph");
    const auto field = ls.field();
    const std::size_t r = ls.rank();
    const auto& pts = md.points();
    std::vector<Generator> gens;
    for (const auto& x : pts)
        for (std::size_t j = 0; j < r; ++j) gens.push_back({x.id + "*" + std::to_string(j), x.index});
    std::vector<Entry> entries;
    for (const auto& t : md.trajectories()) {
        if (pts[t.to].index != pts[t.from].index + 1) continue;
        add_block(entries, transport(ls, t.word), t.to * r, t.from * r, Scalar::from_int(field, t.sign));
    }
    const std::size_t n = gens.size();
    auto d = SparseMatrix::from_entries(field, n, n, entries);
    if (auto bad = square_defect(d))
        throw InvariantError("d^2 != 0 from critical point '" + pts[bad->second / r].id + "' to '" +
                             pts[bad->first / r].id + "'");
    return CochainComplex::from_global(field, GradedBasis(std::move(gens)), d);
}

// ---------------------------------------------------------------------------
// Cellular data

CellularData::CellularData(BaseGraph base, std::vector<Cell> cells, std::vector<Incidence> incidences,
                           std::vector<CellEnds> ends, std::optional<std::vector<int>> levels)
    : base_(std::move(base)), cells_(std::move(cells)), incidences_(std::move(incidences)), ends_(std::move(ends)),
      levels_(std::move(levels)) {
    std::set<std::string> ids;
    for (const auto& c : cells_) {
        if (!ids.insert(c.id).second) throw InvariantError("duplicate cell '" + c.id + "'");
        if (c.dim < 0) throw InvariantError("cell '" + c.id + "' has a negative dimension");
        if (c.vertex >= base_.vertices().size()) throw InvariantError("cell '" + c.id + "' sits on an unknown vertex");
    }
    std::set<std::size_t> with_ends;
    for (const auto& e : ends_) {
        if (e.cell >= cells_.size() || e.minus >= cells_.size() || e.plus >= cells_.size())
            throw InvariantError("cell ends refer to an unknown cell");
        const auto& c = cells_[e.cell];
        if (c.dim != 1 || cells_[e.minus].dim != 0 || cells_[e.plus].dim != 0)
            throw InvariantError("ends are given for 1-cells and name 0-cells");
        if (!with_ends.insert(e.cell).second) throw InvariantError("cell '" + c.id + "' has its ends given twice");
        check_word(base_, e.minus_word, cells_[e.minus].vertex, c.vertex, "cell '" + c.id + "' minus end");
        check_word(base_, e.plus_word, cells_[e.plus].vertex, c.vertex, "cell '" + c.id + "' plus end");
    }
    for (const auto& inc : incidences_) {
        if (inc.lower >= cells_.size() || inc.upper >= cells_.size())
            throw InvariantError("incidence refers to an unknown cell");
        const auto& lo = cells_[inc.lower];
        const auto& up = cells_[inc.upper];
        const std::string what = "incidence [" + lo.id + " : " + up.id + "]";
        if (up.dim != lo.dim + 1) throw InvariantError(what + " does not raise the dimension by one");
        if (with_ends.count(inc.upper)) throw InvariantError(what + " duplicates the ends of a 1-cell");
        check_word(base_, inc.word, lo.vertex, up.vertex, what);
    }
    if (levels_) {
        if (levels_->size() != cells_.size()) throw InvariantError("one level per cell is required");
        for (int l : *levels_)
            if (l < 0) throw InvariantError("cell levels must be nonnegative");
    }
    // Untwisted incidence complex over Q.
    const auto q = FieldSpec::rationals();
    std::vector<Entry> entries;
    for (const auto& inc : incidences_) entries.push_back({inc.upper, inc.lower, Scalar::from_int(q, inc.number)});
    for (const auto& e : ends_) {
        entries.push_back({e.cell, e.minus, Scalar::from_int(q, -1)});
        entries.push_back({e.cell, e.plus, Scalar::from_int(q, 1)});
    }
    auto d = SparseMatrix::from_entries(q, cells_.size(), cells_.size(), entries);
    if (auto bad = square_defect(d))
        throw InvariantError("untwisted incidences have d^2 != 0 from cell '" + cells_[bad->second].id + "' to '" +
                             cells_[bad->first].id + "'");
}

CochainComplex cellular_complex(const CellularData& cd, const LocalSystem& ls) {
    if (!(ls.base() == cd.base())) throw PreconditionError("local system lives on a different base graph");
    const auto field = ls.field();
    const std::size_t r = ls.rank();
    const auto& cells = cd.cells();
    std::vector<Generator> gens;
    for (const auto& c : cells)
        for (std::size_t j = 0; j < r; ++j) gens.push_back({c.id + "*" + std::to_string(j), c.dim});
    std::vector<Entry> entries;
    for (const auto& inc : cd.incidences())
        add_block(entries, transport(ls, inc.word), inc.upper * r, inc.lower * r,
                  Scalar::from_int(field, inc.number));
    for (const auto& e : cd.ends()) {
        add_block(entries, transport(ls, e.minus_word), e.cell * r, e.minus * r, Scalar::from_int(field, -1));
        add_block(entries, transport(ls, e.plus_word), e.cell * r, e.plus * r, Scalar::from_int(field, 1));
    }
    const std::size_t n = gens.size();
    auto d = SparseMatrix::from_entries(field, n, n, entries);
    if (auto bad = square_defect(d))
        throw InvariantError("d^2 != 0 from cell '" + cells[bad->second / r].id + "' to '" +
                             cells[bad->first / r].id + "'");
    return CochainComplex::from_global(field, GradedBasis(std::move(gens)), d);
}

// ---------------------------------------------------------------------------
// Fiber complexes over the base

ChainLocalSystem::ChainLocalSystem(BaseGraph base, CochainComplex fiber, std::vector<SparseMatrix> actions)
    : base_(std::move(base)), fiber_(std::move(fiber)), actions_(std::move(actions)) {
    if (actions_.size() != base_.edges().size()) throw DimensionError("one fiber action per edge is required");
    const auto& basis = fiber_.basis();
    const std::size_t n = basis.size();
    const auto d = fiber_.global_differential();
    for (std::size_t e = 0; e < actions_.size(); ++e) {
        const auto& a = actions_[e];
        const std::string what = "fiber action on edge '" + base_.edges()[e].id + "'";
        if (!(a.field() == fiber_.field()) || a.rows() != n || a.cols() != n)
            throw DimensionError(what + " must be " + std::to_string(n) + "x" + std::to_string(n) + " over " +
                                 fiber_.field().name());
        for (const auto& entry : a.entries())
            if (basis[entry.row].degree != basis[entry.col].degree)
                throw InvariantError(what + " does not preserve degrees");
        if (!(a * d == d * a)) throw InvariantError(what + " is not a chain map");
        try {
            inverses_.push_back(mat_inverse(a));
        } catch (const InvariantError&) {
            throw InvariantError(what + " is not invertible");
        }
    }
    h_ = cohomology(fiber_);
}

ChainLocalSystem ChainLocalSystem::trivial(BaseGraph base, CochainComplex fiber) {
    std::vector<SparseMatrix> actions(base.edges().size(),
                                      SparseMatrix::identity(fiber.field(), fiber.basis().size()));
    return ChainLocalSystem(std::move(base), std::move(fiber), std::move(actions));
}

SparseMatrix ChainLocalSystem::transport(const EdgePath& path) const {
    base_.end_of(path);
    auto m = SparseMatrix::identity(fiber_.field(), fiber_.basis().size());
    for (const auto& s : path.steps) m = (s.inverse ? inverses_[s.edge] : actions_[s.edge]) * m;
    return m;
}

SparseMatrix ChainLocalSystem::on_cohomology(const SparseMatrix& chain_map, int q) const {
    auto it = h_.representatives.find(q);
    if (it == h_.representatives.end()) return SparseMatrix(fiber_.field(), 0, 0);
    const auto& idx = fiber_.basis().in_degree(q);
    auto block = chain_map.select_rows(idx).select_columns(idx);
    return class_coordinates(h_, q, block * it->second);
}

std::map<int, LocalSystem> ChainLocalSystem::cohomology_systems() const {
    std::map<int, LocalSystem> out;
    for (int q : fiber_.degrees()) {
        const std::size_t rank = h_.dim(q);
        if (rank == 0) continue;
        std::vector<SparseMatrix> t;
        for (const auto& a : actions_) t.push_back(on_cohomology(a, q));
        try {
            out.emplace(q, LocalSystem(base_, fiber_.field(), rank, std::move(t)));
        } catch (const InvariantError& err) {
            throw InvariantError("on H^" + std::to_string(q) + " of the fiber: " + err.what());
        }
    }
    return out;
}

bool ChainLocalSystem::operator==(const ChainLocalSystem& rhs) const {
    return base_ == rhs.base_ && fiber_ == rhs.fiber_ && actions_ == rhs.actions_;
}

// ---------------------------------------------------------------------------
// Fibrations

FibrationData::FibrationData(MorseData base, ChainLocalSystem system, std::vector<Correction> corrections,
                             int shift_n, int shift_k)
    : base_(std::move(base)), system_(std::move(system)), corrections_(std::move(corrections)), shift_n_(shift_n),
      shift_k_(shift_k) {
    if (!(system_.base() == base_.base()))
        throw InvariantError("fiber system and Morse data use different base graphs");
    const auto& pts = base_.points();
    const auto& basis = fiber().basis();
    const std::size_t n = basis.size();
    for (const auto& c : corrections_) {
        if (c.from >= pts.size() || c.to >= pts.size()) throw InvariantError("correction has an unknown end");
        const std::string what = "correction from '" + pts[c.from].id + "' to '" + pts[c.to].id + "'";
        const int r = pts[c.to].index - pts[c.from].index;
        if (r < 2) throw InvariantError(what + " must raise the index by at least two");
        if (!(c.block.field() == fiber().field()) || c.block.rows() != n || c.block.cols() != n)
            throw DimensionError(what + " must be " + std::to_string(n) + "x" + std::to_string(n) + " over " +
                                 fiber().field().name());
        for (const auto& e : c.block.entries())
            if (basis[e.row].degree != basis[e.col].degree + 1 - r)
                throw InvariantError(what + " must lower the fiber degree by " + std::to_string(r - 1));
    }
}

SplitFilteredComplex assemble_fibration(const FibrationData& fd) {
    const auto& pts = fd.base().points();
    const auto& fiber = fd.fiber();
    const auto field = fiber.field();
    const auto& fb = fiber.basis();
    const std::size_t m = fb.size();
    std::vector<Generator> gens;
    std::vector<int> blocks;
    for (const auto& x : pts)
        for (const auto& a : fb.generators()) {
            gens.push_back({x.id + "*" + a.id, x.index + a.degree});
            blocks.push_back(x.index);
        }
    std::vector<Entry> entries;
    const auto df = fiber.global_differential();
    for (std::size_t i = 0; i < pts.size(); ++i)
        add_block(entries, df, i * m, i * m, Scalar::from_int(field, pts[i].index % 2 == 0 ? 1 : -1));
    for (const auto& t : fd.base().trajectories()) {
        if (pts[t.to].index != pts[t.from].index + 1) continue;
        add_block(entries, fd.system().transport(t.word), t.to * m, t.from * m, Scalar::from_int(field, t.sign));
    }
    for (const auto& c : fd.corrections()) add_block(entries, c.block, c.to * m, c.from * m, Scalar::from_int(field, 1));
    const std::size_t n = gens.size();
    auto d = SparseMatrix::from_entries(field, n, n, entries);
    auto dd = d * d;
    if (!dd.is_zero()) {
        std::optional<Bidegree> worst;
        for (const auto& e : dd.entries()) {
            Bidegree b{blocks[e.col], gens[e.col].degree - blocks[e.col]};
            if (!worst || b < *worst) worst = b;
        }
        throw InvariantError("d^2 != 0 at bidegree (" + std::to_string(fd.shift_n() + worst->p) + "," +
                             std::to_string(fd.shift_k() + worst->q) + ")");
    }
    auto complex = CochainComplex::from_global(field, GradedBasis(std::move(gens)), d, fd.shift_n() + fd.shift_k());
    return SplitFilteredComplex(std::move(complex), std::move(blocks), fd.base().max_index());
}

std::size_t E2Table::dim(int p, int q) const {
    auto it = dims.find({p, q});
    return it == dims.end() ? 0 : it->second;
}

E2Table e2_table(const FibrationData& fd) {
    E2Table out;
    out.shift_n = fd.shift_n();
    out.shift_k = fd.shift_k();
    out.coefficient_systems = fd.system().cohomology_systems();
    for (const auto& [q, ls] : out.coefficient_systems) {
        auto h = cohomology(morse_complex(fd.base(), ls));
        for (auto [p, d] : h.dims)
            if (d > 0) out.dims[{p, q}] = d;
    }
    auto split = assemble_fibration(fd);
    auto engine = nonzero_dims(page(split.to_filtered(), 2));
    if (engine != out.dims) {
        std::set<Bidegree> keys;
        for (const auto& [b, d] : engine) keys.insert(b);
        for (const auto& [b, d] : out.dims) keys.insert(b);
        for (const auto& b : keys) {
            auto a = engine.count(b) ? engine.at(b) : 0;
            auto c = out.dim(b.p, b.q);
            if (a != c)
                throw InvariantError("E_2 from local coefficients differs from page 2 at (" +
                                     std::to_string(out.shift_n + b.p) + "," + std::to_string(out.shift_k + b.q) +
                                     "): " + std::to_string(c) + " vs " + std::to_string(a));
        }
    }
    return out;
}

LerayComparison leray_serre_compare(const CellularData& total, const FibrationData& fd) {
    if (!total.levels()) throw PreconditionError("the cellular model needs base-skeleton levels");
    const auto field = fd.fiber().field();
    auto cells = cellular_complex(total, LocalSystem::trivial(total.base(), field, 1));
    auto split = assemble_fibration(fd);
    if (nonzero(cohomology(cells).dims) != nonzero(cohomology(split.complex()).dims))
        throw PreconditionError("total cohomology disagrees");
    const auto& levels = *total.levels();
    int n = split.length();
    for (int l : levels) n = std::max(n, l);
    SpectralSequence cellular(FilteredComplex::from_levels(cells, levels, n));
    SpectralSequence fibration(split.to_filtered());
    LerayComparison out;
    out.first_page = 2;
    out.last_page = n + 1;
    for (int r = out.first_page; r <= out.last_page; ++r) {
        auto a = nonzero_dims(cellular.page(r));
        auto b = nonzero_dims(fibration.page(r));
        std::set<Bidegree> keys;
        for (const auto& [k, d] : a) keys.insert(k);
        for (const auto& [k, d] : b) keys.insert(k);
        for (const auto& k : keys) {
            auto x = a.count(k) ? a.at(k) : 0;
            auto y = b.count(k) ? b.at(k) : 0;
            if (x != y)
                out.differences.push_back("E_" + std::to_string(r) + " (" + std::to_string(k.p) + "," +
                                          std::to_string(k.q) + "): cellular " + std::to_string(x) +
                                          ", fibration " + std::to_string(y));
        }
        out.cellular.emplace(r, std::move(a));
        out.fibration.emplace(r, std::move(b));
    }
    out.agree = out.differences.empty();
    return out;
}

ComposeCheck transport_compose_check(const MorseData& md, const ChainLocalSystem& system, std::size_t u,
                                     std::size_t v, std::size_t gamma) {
    const auto& ts = md.trajectories();
    if (u >= ts.size() || v >= ts.size() || gamma >= ts.size()) throw PreconditionError("unknown trajectory");
    if (!(system.base() == md.base())) throw PreconditionError("fiber system lives on a different base graph");
    const auto &tu = ts[u], &tv = ts[v], &tg = ts[gamma];
    if (tu.to != tv.from || tg.from != tu.from || tg.to != tv.to)
        throw PreconditionError("trajectories '" + tu.id + "', '" + tv.id + "' and '" + tg.id +
                                "' do not form a broken pair and its gluing");
    const auto& base = md.base();
    auto loop = base.concat(base.concat(tu.word, tv.word), base.inverse(tg.word));
    auto reduced = cyclic_reduce(loop.steps);
    bool declared = reduced.empty();
    for (const auto& rel : base.relations()) {
        if (declared) break;
        auto r = cyclic_reduce(rel.steps);
        declared = cyclic_rotation_of(r, reduced) || cyclic_rotation_of(invert_steps(r), reduced);
    }
    if (!declared)
        throw PreconditionError("no declared homotopy between '" + tg.id + "' and '" + tu.id + "' then '" + tv.id +
                                "'");
    auto composite = system.transport(tv.word) * system.transport(tu.word);
    auto direct = system.transport(tg.word);
    ComposeCheck out;
    out.chain_discrepancy = direct - composite;
    out.on_chains = out.chain_discrepancy.is_zero();
    out.on_cohomology = true;
    for (int q : system.fiber().degrees())
        if (!(system.on_cohomology(direct, q) == system.on_cohomology(composite, q))) out.on_cohomology = false;
    return out;
}

FibrationData product_fibration(const CochainComplex& base, const CochainComplex& fiber) {
    if (!(base.field() == fiber.field())) throw PreconditionError("base and fiber use different fields");
    const auto field = base.field();
    const auto& bb = base.basis();
    std::vector<std::string> vertices;
    std::vector<CriticalPoint> points;
    for (std::size_t i = 0; i < bb.size(); ++i) {
        if (bb[i].degree < 0) throw PreconditionError("base generator '" + bb[i].id + "' has negative degree");
        vertices.push_back(bb[i].id);
        points.push_back({bb[i].id, bb[i].degree, i});
    }
    std::vector<Edge> edges;
    std::vector<std::tuple<std::size_t, std::size_t, int>> ends;
    for (const auto& e : base.global_differential().entries()) {
        long long c;
        if (field.is_prime()) {
            auto p = static_cast<long long>(field.characteristic());
            c = static_cast<long long>(e.value.residue());
            if (c > p / 2) c -= p;
        } else {
            const auto& q = e.value.rational();
            if (q.get_den() != 1 || !q.get_num().fits_slong_p())
                throw PreconditionError("base coefficients must be small integers");
            c = q.get_num().get_si();
        }
        if (std::llabs(c) > 64) throw PreconditionError("base coefficient too large to realise by trajectories");
        for (long long t = 0; t < std::llabs(c); ++t) {
            edges.push_back({bb[e.col].id + ">" + bb[e.row].id + "#" + std::to_string(t), bb[e.col].id, bb[e.row].id});
            ends.emplace_back(e.col, e.row, c > 0 ? 1 : -1);
        }
    }
    BaseGraph graph(vertices, edges);
    std::vector<Trajectory> trajectories;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto [from, to, sign] = ends[i];
        trajectories.push_back({edges[i].id, from, to, sign, EdgePath{from, {Step{i, false}}}});
    }
    MorseData md(graph, std::move(points), std::move(trajectories));
    return FibrationData(std::move(md), ChainLocalSystem::trivial(graph, fiber));
}

// ---------------------------------------------------------------------------
// Action windows

void check_action(const SplitFilteredComplex& c, const std::vector<long long>& action) {
    const auto& basis = c.complex().basis();
    if (action.size() != basis.size()) throw PreconditionError("one action value per generator is required");
    for (const auto& e : c.complex().global_differential().entries())
        if (!(action[e.row] < action[e.col]))
            throw InvariantError("differential from '" + basis[e.col].id + "' to '" + basis[e.row].id +
                                 "' does not lower the action");
}

SplitFilteredComplex window_complex(const SplitFilteredComplex& c, const std::vector<long long>& action,
                                    ActionWindow window) {
    check_action(c, action);
    if (window.lo > window.hi) throw PreconditionError("action window has lo > hi");
    const auto& basis = c.complex().basis();
    std::vector<std::size_t> keep;
    std::vector<Generator> gens;
    std::vector<int> blocks;
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (window.lo <= action[i] && action[i] < window.hi) {
            keep.push_back(i);
            gens.push_back(basis[i]);
            blocks.push_back(c.blocks()[i]);
        }
    auto d = c.complex().global_differential().select_rows(keep).select_columns(keep);
    auto complex = CochainComplex::from_global(c.field(), GradedBasis(std::move(gens)), d,
                                               c.complex().display_shift());
    return SplitFilteredComplex(std::move(complex), std::move(blocks), c.length());
}

ChainMap truncation_map(const SplitFilteredComplex& c, const std::vector<long long>& action, ActionWindow from,
                        ActionWindow to) {
    if (from.lo > to.lo || from.hi > to.hi)
        throw PreconditionError("truncation needs a <= a' and b <= b'");
    auto source = window_complex(c, action, from);
    auto target = window_complex(c, action, to);
    const auto& sb = source.complex().basis();
    const auto& tb = target.complex().basis();
    const auto& full = c.complex().basis();
    std::map<int, SparseMatrix> blocks;
    for (int k : sb.degrees()) {
        std::vector<Entry> entries;
        for (std::size_t i : sb.in_degree(k)) {
            auto g = *full.index_of(sb[i].id);
            if (action[g] < to.lo) continue;
            auto j = *tb.index_of(sb[i].id);
            entries.push_back({tb.local_index(j), sb.local_index(i), Scalar::from_int(c.field(), 1)});
        }
        blocks.emplace(k, SparseMatrix::from_entries(c.field(), tb.dim(k), sb.dim(k), entries));
    }
    return ChainMap(source.complex(), target.complex(), std::move(blocks));
}

} // namespace fibss
