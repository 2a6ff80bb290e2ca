#include "fibss/localsys.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>

namespace fibss {

// ---------------------------------------------------------------------------
// BaseGraph

BaseGraph::BaseGraph(std::vector<std::string> vertices, std::vector<Edge> edges, std::vector<std::string> relations)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (!vertex_index_.emplace(vertices_[i], i).second)
            throw InvariantError("duplicate vertex '" + vertices_[i] + "'");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        if (!edge_index_.emplace(e.id, i).second) throw InvariantError("duplicate edge '" + e.id + "'");
        auto from = vertex_index(e.from);
        auto to = vertex_index(e.to);
        if (!from || !to) throw InvariantError("edge '" + e.id + "' has an unknown endpoint");
        sources_.push_back(*from);
        targets_.push_back(*to);
    }
    for (auto& text : relations) {
        EdgePath path;
        try {
            path = parse_path(text);
        } catch (const PreconditionError& err) {
            throw InvariantError("relation '" + text + "': " + err.what());
        }
        if (path.steps.empty() || end_of(path) != path.start)
            throw InvariantError("relation '" + text + "' is not a closed loop");
        relations_.push_back(std::move(path));
        relation_texts_.push_back(format_path(relations_.back()));
    }
}

std::optional<std::size_t> BaseGraph::vertex_index(std::string_view id) const {
    auto it = vertex_index_.find(std::string(id));
    if (it == vertex_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> BaseGraph::edge_index(std::string_view id) const {
    auto it = edge_index_.find(std::string(id));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
}

EdgePath BaseGraph::parse_path(std::string_view text, std::optional<std::size_t> start) const {
    std::istringstream in{std::string(text)};
    std::string token;
    EdgePath path;
    while (in >> token) {
        bool inverse = false;
        if (token.size() > 3 && token.ends_with("^-1")) {
            inverse = true;
            token.resize(token.size() - 3);
        }
        auto e = edge_index(token);
        if (!e) throw PreconditionError("unknown edge '" + token + "'");
        path.steps.push_back({*e, inverse});
    }
    if (path.steps.empty()) {
        if (!start) throw PreconditionError("an empty word needs a start vertex");
        path.start = *start;
    } else {
        const auto& s = path.steps.front();
        path.start = s.inverse ? targets_[s.edge] : sources_[s.edge];
        if (start && *start != path.start)
            throw PreconditionError("word '" + std::string(text) + "' does not start at '" + vertices_[*start] + "'");
    }
    end_of(path);
    return path;
}

std::string BaseGraph::format_path(const EdgePath& path) const {
    std::string out;
    for (const auto& s : path.steps) {
        if (!out.empty()) out += ' ';
        out += edges_[s.edge].id;
        if (s.inverse) out += "^-1";
    }
    return out;
}

std::size_t BaseGraph::end_of(const EdgePath& path) const {
    if (path.start >= vertices_.size()) throw PreconditionError("path starts at an unknown vertex");
    auto at = path.start;
    for (const auto& s : path.steps) {
        if (s.edge >= edges_.size()) throw PreconditionError("path uses an unknown edge");
        const auto from = s.inverse ? targets_[s.edge] : sources_[s.edge];
        if (from != at)
            throw PreconditionError("non-composable word: '" + edges_[s.edge].id + (s.inverse ? "^-1" : "") +
                                    "' does not start at '" + vertices_[at] + "'");
        at = s.inverse ? sources_[s.edge] : targets_[s.edge];
    }
    return at;
}

EdgePath BaseGraph::concat(const EdgePath& a, const EdgePath& b) const {
    if (end_of(a) != b.start) throw PreconditionError("paths are not composable");
    EdgePath out = a;
    out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
    return out;
}

EdgePath BaseGraph::inverse(const EdgePath& a) const {
    EdgePath out{end_of(a), {}};
    for (auto it = a.steps.rbegin(); it != a.steps.rend(); ++it) out.steps.push_back({it->edge, !it->inverse});
    return out;
}

bool BaseGraph::operator==(const BaseGraph& rhs) const {
    return vertices_ == rhs.vertices_ && edges_ == rhs.edges_ && relations_ == rhs.relations_;
}

// ---------------------------------------------------------------------------
// LocalSystem

LocalSystem::LocalSystem(BaseGraph base, FieldSpec field, std::size_t rank, std::vector<SparseMatrix> transports,
                         bool check)
    : base_(std::move(base)), field_(field), rank_(rank), transports_(std::move(transports)) {
    if (transports_.size() != base_.edges().size())
        throw DimensionError("one transport per edge is required");
    for (std::size_t e = 0; e < transports_.size(); ++e) {
        const auto& m = transports_[e];
        if (!(m.field() == field_) || m.rows() != rank_ || m.cols() != rank_)
            throw DimensionError("transport on edge '" + base_.edges()[e].id + "' must be " + std::to_string(rank_) +
                                 "x" + std::to_string(rank_) + " over " + field_.name());
        try {
            inverses_.push_back(mat_inverse(m));
        } catch (const InvariantError&) {
            throw InvariantError("transport on edge '" + base_.edges()[e].id + "' is not invertible");
        }
    }
    if (check) {
        auto result = check_homotopy_invariance(*this);
        if (!result.ok) throw InvariantError("transport around relation '" + result.word + "' is not the identity");
    }
}

LocalSystem::LocalSystem(BaseGraph base, FieldSpec field, std::size_t rank, std::vector<SparseMatrix> transports)
    : LocalSystem(std::move(base), field, rank, std::move(transports), true) {}

LocalSystem LocalSystem::unchecked(BaseGraph base, FieldSpec field, std::size_t rank,
                                   std::vector<SparseMatrix> transports) {
    return LocalSystem(std::move(base), field, rank, std::move(transports), false);
}

LocalSystem LocalSystem::trivial(BaseGraph base, FieldSpec field, std::size_t rank) {
    std::vector<SparseMatrix> t(base.edges().size(), SparseMatrix::identity(field, rank));
    return LocalSystem(std::move(base), field, rank, std::move(t), false);
}

bool LocalSystem::operator==(const LocalSystem& rhs) const {
    return base_ == rhs.base_ && field_ == rhs.field_ && rank_ == rhs.rank_ && transports_ == rhs.transports_;
}

SparseMatrix transport(const LocalSystem& ls, const EdgePath& path) {
    ls.base().end_of(path);
    auto m = SparseMatrix::identity(ls.field(), ls.rank());
    for (const auto& s : path.steps) m = (s.inverse ? ls.edge_inverse(s.edge) : ls.edge_transport(s.edge)) * m;
    return m;
}

SparseMatrix transport(const LocalSystem& ls, std::string_view word) {
    return transport(ls, ls.base().parse_path(word));
}

HomotopyCheck check_homotopy_invariance(const LocalSystem& ls) {
    const auto id = SparseMatrix::identity(ls.field(), ls.rank());
    const auto& base = ls.base();
    for (std::size_t i = 0; i < base.relations().size(); ++i) {
        if (!(transport(ls, base.relations()[i]) == id))
            return {false, base.relations()[i], base.relation_texts()[i]};
    }
    return {};
}

// ---------------------------------------------------------------------------
// LocalSubsystem

LocalSubsystem::LocalSubsystem(BaseGraph base, FieldSpec field, std::size_t rank, std::vector<std::size_t> carrier,
                               std::vector<EdgePath> paths, std::vector<SparseMatrix> transports)
    : base_(std::move(base)), field_(field), rank_(rank), carrier_(std::move(carrier)), paths_(std::move(paths)),
      transports_(std::move(transports)) {
    std::sort(carrier_.begin(), carrier_.end());
    carrier_.erase(std::unique(carrier_.begin(), carrier_.end()), carrier_.end());
    if (carrier_.empty()) throw InvariantError("a local subsystem needs a nonempty carrier");
    for (auto v : carrier_)
        if (v >= base_.vertices().size()) throw InvariantError("carrier vertex out of range");
    if (paths_.size() != transports_.size()) throw DimensionError("one transport per generating path is required");
    for (std::size_t i = 0; i < paths_.size(); ++i) {
        auto end = base_.end_of(paths_[i]);
        if (!in_carrier(paths_[i].start) || !in_carrier(end))
            throw InvariantError("path '" + base_.format_path(paths_[i]) + "' leaves the carrier");
        const auto& m = transports_[i];
        if (!(m.field() == field_) || m.rows() != rank_ || m.cols() != rank_ || mat_rank(m) != rank_)
            throw InvariantError("transport along '" + base_.format_path(paths_[i]) +
                                 "' is not an invertible " + std::to_string(rank_) + "x" + std::to_string(rank_) +
                                 " matrix");
    }
}

bool LocalSubsystem::in_carrier(std::size_t vertex) const {
    return std::binary_search(carrier_.begin(), carrier_.end(), vertex);
}

bool LocalSubsystem::connected_support() const {
    std::map<std::size_t, bool> seen;
    for (auto v : carrier_) seen[v] = false;
    std::deque<std::size_t> queue{carrier_.front()};
    seen[carrier_.front()] = true;
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (const auto& p : paths_) {
            auto a = p.start, b = base_.end_of(p);
            for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}})
                if (from == v && !seen[to]) {
                    seen[to] = true;
                    queue.push_back(to);
                }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](const auto& kv) { return kv.second; });
}

bool LocalSubsystem::operator==(const LocalSubsystem& rhs) const {
    return base_ == rhs.base_ && field_ == rhs.field_ && rank_ == rhs.rank_ && carrier_ == rhs.carrier_ &&
           paths_ == rhs.paths_ && transports_ == rhs.transports_;
}

std::string to_string(Surjectivity s) {
    switch (s) {
    case Surjectivity::Yes: return "yes";
    case Surjectivity::No: return "no";
    case Surjectivity::Unknown: return "unknown";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Spanning trees and free words

namespace {

struct Tree {
    std::vector<std::optional<EdgePath>> paths;
    std::vector<bool> in_tree;
    std::vector<std::size_t> generator_of;  // letter index per non-tree edge, npos for tree edges
    std::vector<std::size_t> non_tree;      // edges outside the tree, in edge order
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

Tree spanning_tree(const BaseGraph& g, std::size_t x0) {
    Tree t;
    const auto nv = g.vertices().size();
    const auto ne = g.edges().size();
    t.paths.assign(nv, std::nullopt);
    t.in_tree.assign(ne, false);
    t.paths[x0] = g.constant(x0);
    std::deque<std::size_t> queue{x0};
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (std::size_t e = 0; e < ne; ++e) {
            for (bool inv : {false, true}) {
                auto from = inv ? g.target(e) : g.source(e);
                auto to = inv ? g.source(e) : g.target(e);
                if (from != v || t.paths[to]) continue;
                auto path = *t.paths[v];
                path.steps.push_back({e, inv});
                t.paths[to] = std::move(path);
                t.in_tree[e] = true;
                queue.push_back(to);
            }
        }
    }
    t.generator_of.assign(ne, npos);
    for (std::size_t e = 0; e < ne; ++e)
        if (!t.in_tree[e] && t.paths[g.source(e)]) {
            t.generator_of[e] = t.non_tree.size();
            t.non_tree.push_back(e);
        }
    return t;
}

// Letters are ±(index + 1).
using Word = std::vector<int>;

void push_reduced(Word& w, int letter) {
    if (!w.empty() && w.back() == -letter)
        w.pop_back();
    else
        w.push_back(letter);
}

Word multiply(const Word& a, const Word& b) {
    Word out = a;
    for (int x : b) push_reduced(out, x);
    return out;
}

Word invert(const Word& a) {
    Word out;
    for (auto it = a.rbegin(); it != a.rend(); ++it) out.push_back(-*it);
    return out;
}

Word free_word(const Tree& t, const EdgePath& path) {
    Word w;
    for (const auto& s : path.steps) {
        auto g = t.generator_of[s.edge];
        if (g == npos) continue;
        push_reduced(w, s.inverse ? -static_cast<int>(g + 1) : static_cast<int>(g + 1));
    }
    return w;
}

// Stallings folding of a flower of words, keeping for every edge an
// expression in the petal tokens so that reading a closed path from the
// root yields the product of petal generators that spells it.
class Folding {
public:
    void add_petal(const Word& word, int token) {
        if (word.empty()) return;
        if (adjacency_.empty()) new_vertex();
        std::size_t at = 0;
        for (std::size_t i = 0; i < word.size(); ++i) {
            const bool last = i + 1 == word.size();
            std::size_t next = last ? 0 : new_vertex();
            const int x = word[i];
            Word value;
            if (last) value = {token};
            if (x > 0)
                add_edge(at, next, x, value);
            else
                add_edge(next, at, -x, invert(value));
            at = next;
        }
    }

    void fold() {
        std::deque<std::size_t> work;
        for (std::size_t v = 0; v < adjacency_.size(); ++v) work.push_back(v);
        while (!work.empty()) {
            auto v = work.front();
            work.pop_front();
            if (dead_vertex(v)) continue;
            auto clash = find_clash(v);
            while (clash) {
                auto [key, e1, e2] = *clash;
                merge(v, key, e1, e2, work);
                if (dead_vertex(v)) break;
                clash = find_clash(v);
            }
        }
    }

    /// Reads a word from the root; returns the expression if it closes up.
    std::optional<Word> read(const Word& word) const {
        std::size_t at = 0;
        Word value;
        for (int x : word) {
            const bool forward = x > 0;
            if (adjacency_.empty()) return std::nullopt;
            auto it = adjacency_[at].find({std::abs(x), forward});
            if (it == adjacency_[at].end()) return std::nullopt;
            auto live = std::find_if(it->second.begin(), it->second.end(), [&](std::size_t id) { return edges_[id].alive; });
            if (live == it->second.end()) return std::nullopt;
            const auto& e = edges_[*live];
            value = multiply(value, forward ? e.value : invert(e.value));
            at = forward ? e.to : e.from;
        }
        if (at != 0) return std::nullopt;
        return value;
    }

    const std::vector<Word>& relations() const { return relations_; }

private:
    struct FEdge {
        std::size_t from, to;
        int letter;
        Word value;
        bool alive = true;
    };
    using Key = std::pair<int, bool>;  // letter, leaving this vertex forwards

    std::size_t new_vertex() {
        adjacency_.emplace_back();
        return adjacency_.size() - 1;
    }

    void add_edge(std::size_t from, std::size_t to, int letter, Word value) {
        if (adjacency_.empty()) new_vertex();
        edges_.push_back({from, to, letter, std::move(value)});
        const auto id = edges_.size() - 1;
        adjacency_[from][{letter, true}].push_back(id);
        adjacency_[to][{letter, false}].push_back(id);
    }

    bool dead_vertex(std::size_t v) const { return merged_into_.count(v) > 0; }

    std::optional<std::tuple<Key, std::size_t, std::size_t>> find_clash(std::size_t v) {
        for (auto& [key, ids] : adjacency_[v]) {
            std::erase_if(ids, [&](std::size_t id) { return !edges_[id].alive; });
            if (ids.size() >= 2) return std::tuple{key, ids[0], ids[1]};
        }
        return std::nullopt;
    }

    // Value of an edge when left from v; the far endpoint.
    std::pair<Word, std::size_t> leave(std::size_t id, bool forward) const {
        const auto& e = edges_[id];
        return forward ? std::pair{e.value, e.to} : std::pair{invert(e.value), e.from};
    }

    void gauge(std::size_t b, const Word& h) {
        for (auto& [key, ids] : adjacency_[b])
            for (auto id : ids) {
                auto& e = edges_[id];
                if (!e.alive) continue;
                // Each incidence is visited once per side, so loops at b get both factors.
                if (key.second)
                    e.value = multiply(invert(h), e.value);
                else
                    e.value = multiply(e.value, h);
            }
    }

    void merge(std::size_t v, const Key& key, std::size_t e1, std::size_t e2, std::deque<std::size_t>& work) {
        const bool dir = key.second;
        auto [val1, a] = leave(e1, dir);
        auto [val2, b] = leave(e2, dir);
        if (a == b) {
            auto rel = multiply(val1, invert(val2));
            if (!rel.empty()) relations_.push_back(std::move(rel));
            edges_[e2].alive = false;
            work.push_back(v);
            return;
        }
        auto keep_edge = e1, drop_edge = e2;
        auto keep = a, drop = b;
        Word h = multiply(invert(val2), val1);
        auto degree = [&](std::size_t x) {
            std::size_t d = 0;
            for (const auto& [k, ids] : adjacency_[x]) d += ids.size();
            return d;
        };
        if (drop == 0 || (keep != 0 && degree(drop) > degree(keep))) {
            std::swap(keep_edge, drop_edge);
            std::swap(keep, drop);
            h = multiply(invert(val1), val2);
        }
        gauge(drop, h);
        edges_[drop_edge].alive = false;
        work.push_back(keep);
        for (auto& [key, ids] : adjacency_[drop])
            for (auto id : ids) {
                auto& e = edges_[id];
                if (!e.alive) continue;
                if (key.second)
                    e.from = keep;
                else
                    e.to = keep;
                adjacency_[keep][key].push_back(id);
                // The far end may now see parallel edges.
                work.push_back(key.second ? e.to : e.from);
            }
        adjacency_[drop].clear();
        merged_into_[drop] = keep;
    }

    std::vector<FEdge> edges_;
    std::vector<std::map<Key, std::vector<std::size_t>>> adjacency_;
    std::map<std::size_t, std::size_t> merged_into_;
    std::vector<Word> relations_;
};

// All reduced words of length <= depth over n letters, capped in number.
std::vector<Word> reduced_words(int letters, int depth, std::size_t cap, bool& truncated) {
    std::vector<Word> out{Word{}};
    std::size_t frontier_begin = 0;
    for (int len = 1; len <= depth; ++len) {
        const auto frontier_end = out.size();
        for (auto i = frontier_begin; i < frontier_end; ++i) {
            for (int x = -letters; x <= letters; ++x) {
                if (x == 0) continue;
                const auto& w = out[i];
                if (!w.empty() && w.back() == -x) continue;
                if (out.size() >= cap) {
                    truncated = true;
                    return out;
                }
                auto next = w;
                next.push_back(x);
                out.push_back(std::move(next));
            }
        }
        frontier_begin = frontier_end;
    }
    return out;
}

} // namespace

std::vector<std::optional<EdgePath>> tree_paths(const BaseGraph& base, std::size_t x0) {
    return spanning_tree(base, x0).paths;
}

std::vector<EdgePath> fundamental_generators(const BaseGraph& base, std::size_t x0) {
    auto t = spanning_tree(base, x0);
    std::vector<EdgePath> out;
    for (auto e : t.non_tree) {
        EdgePath loop = *t.paths[base.source(e)];
        loop.steps.push_back({e, false});
        out.push_back(base.concat(loop, base.inverse(*t.paths[base.target(e)])));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Extension

MonodromyReport extend_subsystem(const LocalSubsystem& sub, const ExtendOptions& options) {
    const auto& g = sub.base();
    const auto& field = sub.field();
    const auto rank = sub.rank();
    const auto id = SparseMatrix::identity(field, rank);
    const auto x0 = options.base_point.value_or(sub.carrier().front());
    if (!sub.in_carrier(x0)) throw PreconditionError("base point '" + g.vertices().at(x0) + "' is not in the carrier");
    if (!sub.connected_support()) throw PreconditionError("disconnected support");

    MonodromyReport report;
    report.base_point = x0;
    auto tree = spanning_tree(g, x0);
    for (std::size_t v = 0; v < g.vertices().size(); ++v)
        if (!tree.paths[v]) throw PreconditionError("base graph is disconnected");
    report.base_generators = fundamental_generators(g, x0);
    const int letters = static_cast<int>(tree.non_tree.size());

    // σ_v: a path inside the subsystem from x0 to each carrier vertex, with its transport.
    std::map<std::size_t, std::pair<EdgePath, SparseMatrix>> sigma;
    sigma.emplace(x0, std::pair{g.constant(x0), id});
    std::deque<std::size_t> queue{x0};
    std::vector<SparseMatrix> inverses;
    for (const auto& m : sub.transports()) inverses.push_back(mat_inverse(m));
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < sub.paths().size(); ++i) {
            const auto& p = sub.paths()[i];
            const auto a = p.start, b = g.end_of(p);
            for (bool inv : {false, true}) {
                auto from = inv ? b : a;
                auto to = inv ? a : b;
                if (from != v || sigma.count(to)) continue;
                const auto& [path, phi] = sigma.at(v);
                auto step = inv ? g.inverse(p) : p;
                sigma.emplace(to, std::pair{g.concat(path, step), (inv ? inverses[i] : sub.transports()[i]) * phi});
                queue.push_back(to);
            }
        }
    }

    // Loops ℓ_γ = σ_u γ σ_v^-1 with χ(ℓ_γ) = Φ(σ_v)^-1 Φ_γ Φ(σ_u).
    std::vector<SparseMatrix> chi;
    std::vector<Word> petals;
    for (std::size_t i = 0; i < sub.paths().size(); ++i) {
        const auto& p = sub.paths()[i];
        const auto& [su, phi_u] = sigma.at(p.start);
        const auto& [sv, phi_v] = sigma.at(g.end_of(p));
        auto loop = g.concat(g.concat(su, p), g.inverse(sv));
        report.subsystem_loops.push_back(loop);
        chi.push_back(mat_inverse(phi_v) * sub.transports()[i] * phi_u);
        petals.push_back(free_word(tree, loop));
        if (petals.back().empty() && !(chi.back() == id))
            throw InvariantError("transport around the null-homotopic loop '" + g.format_path(loop) +
                                 "' is not the identity");
    }
    std::vector<Word> relators;
    for (const auto& r : g.relations()) {
        auto loop = g.concat(g.concat(*tree.paths[r.start], r), g.inverse(*tree.paths[r.start]));
        auto w = free_word(tree, loop);
        if (!w.empty()) relators.push_back(std::move(w));
    }

    // χ on expressions: tokens beyond the subsystem loops are relators, sent to I.
    auto evaluate = [&](const Word& expr) {
        auto m = id;
        for (int t : expr) {
            const auto idx = static_cast<std::size_t>(std::abs(t) - 1);
            if (idx >= chi.size()) continue;
            m = (t > 0 ? chi[idx] : mat_inverse(chi[idx])) * m;
        }
        return m;
    };

    // Fold the subsystem loops alone first, then with conjugated relators.
    std::vector<SparseMatrix> rho;
    auto attempt = [&](int depth) {
        Folding folding;
        int token = 0;
        for (const auto& w : petals) folding.add_petal(w, ++token);
        if (depth >= 0) {
            bool truncated = false;
            auto conjugators = reduced_words(letters, depth, 20000, truncated);
            for (const auto& r : relators)
                for (const auto& u : conjugators) folding.add_petal(multiply(multiply(u, r), invert(u)), ++token);
        }
        folding.fold();
        for (const auto& rel : folding.relations())
            if (!(evaluate(rel) == id))
                throw InvariantError("subsystem transports are incompatible with the homotopies of the base");
        rho.clear();
        for (int x = 1; x <= letters; ++x) {
            auto expr = folding.read(Word{x});
            if (!expr) return false;
            rho.push_back(evaluate(*expr));
        }
        return true;
    };
    bool generated = attempt(-1);
    if (!generated && !relators.empty()) generated = attempt(options.max_word_depth);
    if (!generated) {
        report.verdict = relators.empty() ? Surjectivity::No : Surjectivity::Unknown;
        report.surjective = false;
        return report;
    }
    report.verdict = Surjectivity::Yes;
    report.surjective = true;
    report.monodromy = rho;

    auto rho_of = [&](const Word& w) {
        auto m = id;
        for (int x : w) {
            const auto idx = static_cast<std::size_t>(std::abs(x) - 1);
            m = (x > 0 ? rho[idx] : mat_inverse(rho[idx])) * m;
        }
        return m;
    };
    // Frames Ψ_v standing for the transport along the tree path τ_v.
    std::vector<SparseMatrix> frame(g.vertices().size(), id);
    for (const auto& [v, sp] : sigma) frame[v] = sp.second * mat_inverse(rho_of(free_word(tree, sp.first)));
    std::vector<SparseMatrix> transports;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        Word w;
        if (tree.generator_of[e] != npos) w.push_back(static_cast<int>(tree.generator_of[e] + 1));
        transports.push_back(frame[g.target(e)] * rho_of(w) * mat_inverse(frame[g.source(e)]));
    }
    try {
        report.extension.emplace(g, field, rank, std::move(transports));
    } catch (const InvariantError& err) {
        throw InvariantError(std::string("extension fails a relation of the base: ") + err.what());
    }
    for (std::size_t i = 0; i < sub.paths().size(); ++i)
        if (!(transport(*report.extension, sub.paths()[i]) == sub.transports()[i]))
            throw InvariantError("extension does not restrict to the subsystem along '" +
                                 g.format_path(sub.paths()[i]) + "'");
    return report;
}

} // namespace fibss
