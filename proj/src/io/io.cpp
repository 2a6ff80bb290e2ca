#include "fibss/io.hpp"

#include <algorithm>
#include <climits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fibss::io {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using Entry = SparseMatrix::Entry;

// ---------------------------------------------------------------------------
// Reading

class Node {
public:
    Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const json& raw() const { return *j_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError((path_.empty() ? std::string("document") : path_) + ": " + what);
    }

    Node at(const std::string& key) const {
        auto n = find(key);
        if (!n) fail("missing key '" + key + "'");
        return *n;
    }
    std::optional<Node> find(const std::string& key) const {
        if (!j_->is_object()) fail("expected an object");
        auto it = j_->find(key);
        if (it == j_->end()) return std::nullopt;
        return Node(*it, path_ + "/" + key);
    }
    std::vector<Node> items() const {
        if (!j_->is_array()) fail("expected an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_->size(); ++i) out.emplace_back((*j_)[i], path_ + "/" + std::to_string(i));
        return out;
    }
    std::string str() const {
        if (!j_->is_string()) fail("expected a string");
        return j_->get<std::string>();
    }
    long long integer() const {
        if (!j_->is_number_integer()) fail("expected an integer");
        if (j_->is_number_unsigned() && j_->get<unsigned long long>() > static_cast<unsigned long long>(LLONG_MAX))
            fail("integer out of range");
        return j_->get<long long>();
    }
    int small() const {
        auto v = integer();
        if (v < -1000000 || v > 1000000) fail("integer out of range");
        return static_cast<int>(v);
    }
    Scalar scalar(FieldSpec field) const {
        try {
            if (j_->is_number_integer()) return Scalar::from_int(field, integer());
            if (j_->is_string()) return Scalar::parse(field, j_->get<std::string>());
        } catch (const std::invalid_argument& err) {
            fail(err.what());
        } catch (const std::domain_error& err) {
            fail(err.what());
        }
        fail("expected an integer or a string \"a/b\"");
    }

private:
    const json* j_;
    std::string path_;
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

FieldSpec read_field(const Node& doc, const ParseOptions& o) {
    if (o.field) return *o.field;
    auto n = doc.at("field");
    try {
        return FieldSpec::parse(n.str());
    } catch (const std::invalid_argument& err) {
        n.fail(err.what());
    }
}

BaseGraph read_graph(const Node& n) {
    std::vector<std::string> vertices;
    for (const auto& v : n.at("vertices").items()) vertices.push_back(v.str());
    std::vector<Edge> edges;
    if (auto es = n.find("edges"))
        for (const auto& e : es->items()) {
            Edge edge{e.at("id").str(), e.at("from").str(), e.at("to").str()};
            for (const auto* end : {&edge.from, &edge.to})
                if (std::find(vertices.begin(), vertices.end(), *end) == vertices.end())
                    e.fail("unknown vertex '" + *end + "'");
            edges.push_back(std::move(edge));
        }
    std::vector<std::string> relations;
    if (auto rs = n.find("relations"))
        for (const auto& r : rs->items()) {
            auto text = r.str();
            std::istringstream in(text);
            std::string token;
            while (in >> token) {
                auto id = token.ends_with("^-1") && token.size() > 3 ? token.substr(0, token.size() - 3) : token;
                if (std::none_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.id == id; }))
                    r.fail("unknown edge '" + id + "'");
            }
            relations.push_back(std::move(text));
        }
    return BaseGraph(std::move(vertices), std::move(edges), std::move(relations));
}

std::size_t vertex_of(const BaseGraph& g, const Node& n) {
    auto id = n.str();
    auto v = g.vertex_index(id);
    if (!v) n.fail("unknown vertex '" + id + "'");
    return *v;
}

EdgePath read_word(const BaseGraph& g, const std::optional<Node>& n, std::size_t start) {
    if (!n) return g.constant(start);
    try {
        return g.parse_path(n->str(), start);
    } catch (const PreconditionError& err) {
        n->fail(err.what());
    }
}

GradedBasis read_generators(const Node& n) {
    std::vector<Generator> gens;
    std::set<std::string> seen;
    for (const auto& g : n.items()) {
        Generator gen{g.at("id").str(), g.at("degree").small()};
        if (!seen.insert(gen.id).second) g.fail("duplicate generator '" + gen.id + "'");
        gens.push_back(std::move(gen));
    }
    return GradedBasis(std::move(gens));
}

std::size_t generator_of(const GradedBasis& basis, const Node& n) {
    auto id = n.str();
    auto i = basis.index_of(id);
    if (!i) n.fail("unknown generator '" + id + "'");
    return *i;
}

std::vector<Node> triple(const Node& n) {
    auto parts = n.items();
    if (parts.size() != 3) n.fail("expected [from, to, value]");
    return parts;
}

// Triples [from, to, value] on named generators: global N x N matrix.
SparseMatrix read_named_matrix(const Node& n, FieldSpec field, const GradedBasis& basis) {
    std::vector<Entry> entries;
    for (const auto& t : n.items()) {
        auto parts = triple(t);
        auto from = generator_of(basis, parts[0]);
        auto to = generator_of(basis, parts[1]);
        entries.push_back({to, from, parts[2].scalar(field)});
    }
    return SparseMatrix::from_entries(field, basis.size(), basis.size(), entries);
}

// Triples [from, to, value] on indices 0..size-1.
SparseMatrix read_index_matrix(const Node& n, FieldSpec field, std::size_t size) {
    std::vector<Entry> entries;
    for (const auto& t : n.items()) {
        auto parts = triple(t);
        auto from = parts[0].integer();
        auto to = parts[1].integer();
        if (from < 0 || to < 0 || static_cast<std::size_t>(from) >= size || static_cast<std::size_t>(to) >= size)
            t.fail("index out of range for rank " + std::to_string(size));
        entries.push_back({static_cast<std::size_t>(to), static_cast<std::size_t>(from), parts[2].scalar(field)});
    }
    return SparseMatrix::from_entries(field, size, size, entries);
}

CochainComplex read_complex(const Node& n, FieldSpec field) {
    auto basis = read_generators(n.at("generators"));
    SparseMatrix d(field, basis.size(), basis.size());
    if (auto dn = n.find("differential")) d = read_named_matrix(*dn, field, basis);
    int shift = 0;
    if (auto s = n.find("display_shift")) shift = s->small();
    return CochainComplex::from_global(field, std::move(basis), d, shift);
}

// Per-edge transports; missing edges are the identity.
std::vector<SparseMatrix> read_transports(const Node& doc, const BaseGraph& g, FieldSpec field, std::size_t rank,
                                          const char* key, const GradedBasis* basis) {
    std::vector<SparseMatrix> out(g.edges().size(), SparseMatrix::identity(field, rank));
    std::vector<bool> seen(g.edges().size(), false);
    if (auto ts = doc.find(key))
        for (const auto& t : ts->items()) {
            auto en = t.at("edge");
            auto e = g.edge_index(en.str());
            if (!e) en.fail("unknown edge '" + en.str() + "'");
            if (seen[*e]) en.fail("edge '" + en.str() + "' given twice");
            seen[*e] = true;
            out[*e] = basis ? read_named_matrix(t.at("matrix"), field, *basis)
                            : read_index_matrix(t.at("matrix"), field, rank);
        }
    return out;
}

std::size_t read_rank(const Node& doc) {
    auto n = doc.find("rank");
    if (!n) return 1;
    auto r = n->integer();
    if (r < 0 || r > 100000) n->fail("rank out of range");
    return static_cast<std::size_t>(r);
}

BaseGraph single_vertex() { return BaseGraph({"*"}, {}); }

FilteredComplex read_filtered(const Node& doc, FieldSpec field) {
    auto complex = read_complex(doc, field);
    const auto& basis = complex.basis();
    std::vector<std::map<int, SparseMatrix>> spans;
    for (const auto& level : doc.at("filtration").items()) {
        std::map<int, std::vector<Entry>> entries;
        std::map<int, std::size_t> count;
        for (const auto& vec : level.items()) {
            if (!vec.raw().is_object() || vec.raw().empty()) vec.fail("expected a nonempty {generator: value} object");
            std::optional<int> degree;
            std::vector<std::pair<std::size_t, Scalar>> coords;
            for (auto it = vec.raw().begin(); it != vec.raw().end(); ++it) {
                auto g = basis.index_of(it.key());
                if (!g) vec.fail("unknown generator '" + it.key() + "'");
                if (degree && *degree != basis[*g].degree) vec.fail("vector mixes degrees");
                degree = basis[*g].degree;
                coords.emplace_back(basis.local_index(*g), Node(it.value(), vec.path() + "/" + it.key()).scalar(field));
            }
            auto col = count[*degree]++;
            for (auto& [row, v] : coords) entries[*degree].push_back({row, col, v});
        }
        std::map<int, SparseMatrix> by_degree;
        for (auto& [k, e] : entries) by_degree.emplace(k, SparseMatrix::from_entries(field, basis.dim(k), count[k], e));
        spans.push_back(std::move(by_degree));
    }
    return FilteredComplex(std::move(complex), std::move(spans));
}

SplitDoc read_split(const Node& doc, FieldSpec field) {
    std::vector<Generator> gens;
    std::vector<int> blocks;
    std::vector<long long> action;
    std::set<std::string> seen;
    auto items = doc.at("generators").items();
    for (const auto& g : items) {
        Generator gen{g.at("id").str(), g.at("degree").small()};
        if (!seen.insert(gen.id).second) g.fail("duplicate generator '" + gen.id + "'");
        gens.push_back(gen);
        blocks.push_back(g.at("block").small());
        if (auto a = g.find("action")) action.push_back(a->integer());
    }
    if (!action.empty() && action.size() != gens.size())
        doc.at("generators").fail("either every generator or none carries an action");
    GradedBasis basis(std::move(gens));
    SparseMatrix d(field, basis.size(), basis.size());
    if (auto dn = doc.find("differential")) d = read_named_matrix(*dn, field, basis);
    int shift = 0;
    if (auto s = doc.find("display_shift")) shift = s->small();
    auto complex = CochainComplex::from_global(field, std::move(basis), d, shift);
    auto split = doc.find("length") ? SplitFilteredComplex(std::move(complex), blocks, doc.at("length").small())
                                    : SplitFilteredComplex(std::move(complex), blocks);
    SplitDoc out{std::move(split), std::nullopt};
    if (!action.empty()) {
        check_action(out.complex, action);
        out.action = std::move(action);
    }
    return out;
}

LocalSubsystem read_subsystem(const Node& doc, FieldSpec field, const ParseOptions& o) {
    std::optional<BaseGraph> g;
    if (o.base) g = *o.base;
    else if (auto b = doc.find("base")) g = read_graph(*b);
    else doc.fail("missing key 'base' (or pass a base graph file)");
    const auto rank = read_rank(doc);
    std::vector<std::size_t> carrier;
    for (const auto& v : doc.at("carrier").items()) carrier.push_back(vertex_of(*g, v));
    std::vector<EdgePath> paths;
    std::vector<SparseMatrix> transports;
    for (const auto& p : doc.at("paths").items()) {
        auto wn = p.at("word");
        std::optional<std::size_t> start;
        if (auto s = p.find("start")) start = vertex_of(*g, *s);
        try {
            paths.push_back(g->parse_path(wn.str(), start));
        } catch (const PreconditionError& err) {
            wn.fail(err.what());
        }
        transports.push_back(read_index_matrix(p.at("matrix"), field, rank));
    }
    return LocalSubsystem(*g, field, rank, std::move(carrier), std::move(paths), std::move(transports));
}

MorseData read_morse(const Node& doc, const BaseGraph& g) {
    std::vector<CriticalPoint> points;
    std::map<std::string, std::size_t> index;
    for (const auto& p : doc.at("points").items()) {
        auto id = p.at("id").str();
        std::size_t vertex;
        if (auto v = p.find("vertex")) {
            vertex = vertex_of(g, *v);
        } else if (auto same = g.vertex_index(id)) {
            vertex = *same;
        } else if (g.vertices().size() == 1) {
            vertex = 0;
        } else {
            p.fail("point '" + id + "' needs a vertex");
        }
        if (!index.emplace(id, points.size()).second) p.fail("duplicate point '" + id + "'");
        points.push_back({id, p.at("index").small(), vertex});
    }
    auto point_of = [&](const Node& n) {
        auto it = index.find(n.str());
        if (it == index.end()) n.fail("unknown point '" + n.str() + "'");
        return it->second;
    };
    std::vector<Trajectory> trajectories;
    if (auto ts = doc.find("trajectories"))
        for (const auto& t : ts->items()) {
            auto from = point_of(t.at("from"));
            auto to = point_of(t.at("to"));
            int sign = 1;
            if (auto s = t.find("sign")) sign = s->small();
            trajectories.push_back({t.at("id").str(), from, to, sign, read_word(g, t.find("word"), points[from].vertex)});
        }
    return MorseData(g, std::move(points), std::move(trajectories));
}

CellularData read_cellular(const Node& doc, const BaseGraph& g) {
    std::vector<Cell> cells;
    std::vector<int> levels;
    std::map<std::string, std::size_t> index;
    auto items = doc.at("cells").items();
    for (const auto& c : items) {
        auto id = c.at("id").str();
        std::size_t vertex;
        if (auto v = c.find("vertex")) {
            vertex = vertex_of(g, *v);
        } else if (g.vertices().size() == 1) {
            vertex = 0;
        } else {
            c.fail("cell '" + id + "' needs a vertex");
        }
        if (!index.emplace(id, cells.size()).second) c.fail("duplicate cell '" + id + "'");
        cells.push_back({id, c.at("dim").small(), vertex});
        if (auto l = c.find("level")) levels.push_back(l->small());
    }
    if (!levels.empty() && levels.size() != cells.size())
        doc.at("cells").fail("either every cell or none carries a level");
    auto cell_of = [&](const Node& n) {
        auto it = index.find(n.str());
        if (it == index.end()) n.fail("unknown cell '" + n.str() + "'");
        return it->second;
    };
    std::vector<Incidence> incidences;
    if (auto is = doc.find("incidences"))
        for (const auto& i : is->items()) {
            auto lower = cell_of(i.at("lower"));
            auto upper = cell_of(i.at("upper"));
            incidences.push_back({lower, upper, i.at("number").integer(), read_word(g, i.find("word"), cells[lower].vertex)});
        }
    std::vector<CellEnds> ends;
    if (auto es = doc.find("ends"))
        for (const auto& e : es->items()) {
            auto cell = cell_of(e.at("cell"));
            auto minus = cell_of(e.at("minus"));
            auto plus = cell_of(e.at("plus"));
            ends.push_back({cell, minus, read_word(g, e.find("minus_word"), cells[minus].vertex), plus,
                            read_word(g, e.find("plus_word"), cells[plus].vertex)});
        }
    std::optional<std::vector<int>> lv;
    if (!levels.empty()) lv = std::move(levels);
    return CellularData(g, std::move(cells), std::move(incidences), std::move(ends), std::move(lv));
}

FibrationData read_fibration(const Node& doc, FieldSpec field, const ParseOptions& o) {
    auto g = read_graph(doc.at("base"));
    auto md = read_morse(doc, g);
    auto fiber = read_complex(doc.at("fiber"), field);
    const auto& fb = fiber.basis();
    auto actions = read_transports(doc, g, field, fb.size(), "actions", &fb);
    ChainLocalSystem system(g, fiber, std::move(actions));
    std::vector<Correction> corrections;
    if (auto cs = doc.find("corrections"))
        for (const auto& c : cs->items()) {
            auto from = md.point_index(c.at("from").str());
            auto to = md.point_index(c.at("to").str());
            if (!from || !to) c.fail("unknown point");
            corrections.push_back({*from, *to, read_named_matrix(c.at("matrix"), field, fb)});
        }
    int n = 0, k = 0;
    if (auto s = doc.find("shift_n")) n = s->small();
    if (auto s = doc.find("shift_k")) k = s->small();
    if (o.shift_n) n = *o.shift_n;
    if (o.shift_k) k = *o.shift_k;
    return FibrationData(std::move(md), std::move(system), std::move(corrections), n, k);
}

// ---------------------------------------------------------------------------
// Writing

ojson scalar_json(const Scalar& s) {
    if (s.field().is_prime()) return ojson(static_cast<long long>(s.residue()));
    const auto& q = s.rational();
    if (q.get_den() == 1 && q.get_num().fits_slong_p()) return ojson(q.get_num().get_si());
    return ojson(s.to_string());
}

std::vector<Entry> by_column(const SparseMatrix& m) {
    auto e = m.entries();
    std::stable_sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    return e;
}

ojson named_matrix_json(const SparseMatrix& m, const GradedBasis& basis) {
    ojson out = ojson::array();
    for (const auto& e : by_column(m)) out.push_back(ojson::array({basis[e.col].id, basis[e.row].id, scalar_json(e.value)}));
    return out;
}

ojson index_matrix_json(const SparseMatrix& m) {
    ojson out = ojson::array();
    for (const auto& e : by_column(m)) out.push_back(ojson::array({e.col, e.row, scalar_json(e.value)}));
    return out;
}

ojson graph_json(const BaseGraph& g) {
    ojson out = ojson::object();
    out["vertices"] = g.vertices();
    ojson edges = ojson::array();
    for (const auto& e : g.edges()) edges.push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}});
    out["edges"] = edges;
    if (!g.relation_texts().empty()) out["relations"] = g.relation_texts();
    return out;
}

ojson generators_json(const GradedBasis& basis) {
    ojson out = ojson::array();
    for (const auto& g : basis.generators()) out.push_back({{"id", g.id}, {"degree", g.degree}});
    return out;
}

void complex_body(ojson& out, const CochainComplex& c) {
    if (c.display_shift() != 0) out["display_shift"] = c.display_shift();
    out["generators"] = generators_json(c.basis());
    out["differential"] = named_matrix_json(c.global_differential(), c.basis());
}

ojson transports_json(const BaseGraph& g, const std::vector<SparseMatrix>& t, const GradedBasis* basis) {
    ojson out = ojson::array();
    for (std::size_t e = 0; e < t.size(); ++e) {
        if (t[e] == SparseMatrix::identity(t[e].field(), t[e].rows())) continue;
        out.push_back({{"edge", g.edges()[e].id},
                       {"matrix", basis ? named_matrix_json(t[e], *basis) : index_matrix_json(t[e])}});
    }
    return out;
}

ojson points_json(const MorseData& md) {
    const auto& g = md.base();
    ojson points = ojson::array();
    for (const auto& p : md.points()) {
        ojson o = {{"id", p.id}, {"index", p.index}};
        if (g.vertices()[p.vertex] != p.id) o["vertex"] = g.vertices()[p.vertex];
        points.push_back(o);
    }
    return points;
}

ojson trajectories_json(const MorseData& md) {
    const auto& g = md.base();
    ojson ts = ojson::array();
    for (const auto& t : md.trajectories()) {
        ojson o = {{"id", t.id}, {"from", md.points()[t.from].id}, {"to", md.points()[t.to].id}, {"sign", t.sign}};
        if (!t.word.steps.empty()) o["word"] = g.format_path(t.word);
        ts.push_back(o);
    }
    return ts;
}

ojson to_json(const Document& doc) {
    ojson out = ojson::object();
    out["kind"] = kind_of(doc);
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, CochainComplex>) {
                out["field"] = d.field().name();
                complex_body(out, d);
            } else if constexpr (std::is_same_v<T, FilteredComplex>) {
                const auto& c = d.complex();
                out["field"] = c.field().name();
                complex_body(out, c);
                ojson levels = ojson::array();
                for (int p = 1; p <= d.length(); ++p) {
                    ojson vectors = ojson::array();
                    for (int k : c.degrees()) {
                        const auto& s = d.subspace(p, k);
                        const auto& idx = c.basis().in_degree(k);
                        for (std::size_t j = 0; j < s.cols(); ++j) {
                            ojson v = ojson::object();
                            for (const auto& e : s.column(j).entries()) v[c.basis()[idx[e.row]].id] = scalar_json(e.value);
                            vectors.push_back(v);
                        }
                    }
                    levels.push_back(vectors);
                }
                out["filtration"] = levels;
            } else if constexpr (std::is_same_v<T, SplitDoc>) {
                const auto& c = d.complex.complex();
                out["field"] = c.field().name();
                out["length"] = d.complex.length();
                if (c.display_shift() != 0) out["display_shift"] = c.display_shift();
                ojson gens = ojson::array();
                for (std::size_t i = 0; i < c.basis().size(); ++i) {
                    ojson g = {{"id", c.basis()[i].id}, {"degree", c.basis()[i].degree}, {"block", d.complex.blocks()[i]}};
                    if (d.action) g["action"] = (*d.action)[i];
                    gens.push_back(g);
                }
                out["generators"] = gens;
                out["differential"] = named_matrix_json(c.global_differential(), c.basis());
            } else if constexpr (std::is_same_v<T, BaseGraph>) {
                auto g = graph_json(d);
                for (auto& [k, v] : g.items()) out[k] = v;
            } else if constexpr (std::is_same_v<T, LocalSystem>) {
                out["field"] = d.field().name();
                out["base"] = graph_json(d.base());
                out["rank"] = d.rank();
                out["transports"] = transports_json(d.base(), d.transports(), nullptr);
            } else if constexpr (std::is_same_v<T, LocalSubsystem>) {
                const auto& g = d.base();
                out["field"] = d.field().name();
                out["base"] = graph_json(g);
                out["rank"] = d.rank();
                ojson carrier = ojson::array();
                for (auto v : d.carrier()) carrier.push_back(g.vertices()[v]);
                out["carrier"] = carrier;
                ojson paths = ojson::array();
                for (std::size_t i = 0; i < d.paths().size(); ++i) {
                    ojson p = {{"word", g.format_path(d.paths()[i])}};
                    if (d.paths()[i].steps.empty()) p["start"] = g.vertices()[d.paths()[i].start];
                    p["matrix"] = index_matrix_json(d.transports()[i]);
                    paths.push_back(p);
                }
                out["paths"] = paths;
            } else if constexpr (std::is_same_v<T, MorseDoc>) {
                out["field"] = d.system.field().name();
                out["base"] = graph_json(d.data.base());
                out["points"] = points_json(d.data);
                out["trajectories"] = trajectories_json(d.data);
                out["rank"] = d.system.rank();
                out["transports"] = transports_json(d.system.base(), d.system.transports(), nullptr);
            } else if constexpr (std::is_same_v<T, CellularDoc>) {
                const auto& g = d.data.base();
                const auto& cells = d.data.cells();
                out["field"] = d.system.field().name();
                if (!(g == single_vertex())) out["base"] = graph_json(g);
                ojson cs = ojson::array();
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    ojson c = {{"id", cells[i].id}, {"dim", cells[i].dim}};
                    if (g.vertices().size() != 1) c["vertex"] = g.vertices()[cells[i].vertex];
                    if (d.data.levels()) c["level"] = (*d.data.levels())[i];
                    cs.push_back(c);
                }
                out["cells"] = cs;
                ojson inc = ojson::array();
                for (const auto& i : d.data.incidences()) {
                    ojson o = {{"lower", cells[i.lower].id}, {"upper", cells[i.upper].id}, {"number", i.number}};
                    if (!i.word.steps.empty()) o["word"] = g.format_path(i.word);
                    inc.push_back(o);
                }
                out["incidences"] = inc;
                ojson ends = ojson::array();
                for (const auto& e : d.data.ends()) {
                    ojson o = {{"cell", cells[e.cell].id}, {"minus", cells[e.minus].id}, {"plus", cells[e.plus].id}};
                    if (!e.minus_word.steps.empty()) o["minus_word"] = g.format_path(e.minus_word);
                    if (!e.plus_word.steps.empty()) o["plus_word"] = g.format_path(e.plus_word);
                    ends.push_back(o);
                }
                out["ends"] = ends;
                out["rank"] = d.system.rank();
                out["transports"] = transports_json(g, d.system.transports(), nullptr);
            } else if constexpr (std::is_same_v<T, FibrationData>) {
                const auto& fiber = d.fiber();
                out["field"] = fiber.field().name();
                out["shift_n"] = d.shift_n();
                out["shift_k"] = d.shift_k();
                out["base"] = graph_json(d.base().base());
                out["points"] = points_json(d.base());
                out["trajectories"] = trajectories_json(d.base());
                ojson f = ojson::object();
                complex_body(f, fiber);
                out["fiber"] = f;
                out["actions"] = transports_json(d.base().base(), d.system().actions(), &fiber.basis());
                ojson cs = ojson::array();
                for (const auto& c : d.corrections())
                    cs.push_back({{"from", d.base().points()[c.from].id},
                                  {"to", d.base().points()[c.to].id},
                                  {"matrix", named_matrix_json(c.block, fiber.basis())}});
                out["corrections"] = cs;
            }
        },
        doc);
    return out;
}

int depth(const ojson& j) {
    if (!j.is_structured()) return 0;
    int d = 0;
    for (const auto& c : j) d = std::max(d, depth(c));
    return d + 1;
}

std::string inline_form(const ojson& j) {
    if (!j.is_structured()) return j.dump();
    std::string out = j.is_object() ? "{" : "[";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ", ";
        first = false;
        if (j.is_object()) out += ojson(it.key()).dump() + ": ";
        out += inline_form(*it);
    }
    return out + (j.is_object() ? "}" : "]");
}

// Short shallow values go on one line, everything else is indented.
void emit(const ojson& j, int indent, std::string& out) {
    if (indent > 0 && depth(j) <= 3) {
        auto line = inline_form(j);
        if (line.size() + static_cast<std::size_t>(indent) <= 100) {
            out += line;
            return;
        }
    }
    if (!j.is_structured() || j.empty()) {
        out += inline_form(j);
        return;
    }
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const bool object = j.is_object();
    out += object ? "{\n" : "[\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad;
        if (object) out += ojson(it.key()).dump() + ": ";
        emit(*it, indent + 2, out);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
    }
    out += std::string(static_cast<std::size_t>(indent), ' ') + (object ? "}" : "]");
}

} // namespace

Document parse_document(std::string_view text, const ParseOptions& o) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& err) {
        auto [line, col] = line_column(text, err.byte == 0 ? 0 : err.byte - 1);
        std::string what = err.what();
        if (auto pos = what.find(": ", what.find("column")); pos != std::string::npos) what = what.substr(pos + 2);
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what, line, col);
    }
    Node doc(j, "");
    if (!j.is_object()) doc.fail("expected a top-level object");
    const auto kind = doc.at("kind").str();
    if (kind == "base_graph") return read_graph(doc);
    const auto field = read_field(doc, o);
    if (kind == "complex") return read_complex(doc, field);
    if (kind == "filtered") return read_filtered(doc, field);
    if (kind == "split") return read_split(doc, field);
    if (kind == "local_system") {
        auto g = read_graph(doc.at("base"));
        auto rank = read_rank(doc);
        auto t = read_transports(doc, g, field, rank, "transports", nullptr);
        return LocalSystem(g, field, rank, std::move(t));
    }
    if (kind == "subsystem") return read_subsystem(doc, field, o);
    if (kind == "morse") {
        auto g = read_graph(doc.at("base"));
        auto md = read_morse(doc, g);
        auto rank = read_rank(doc);
        return MorseDoc{std::move(md), LocalSystem(g, field, rank, read_transports(doc, g, field, rank, "transports", nullptr))};
    }
    if (kind == "cellular") {
        auto g = doc.find("base") ? read_graph(doc.at("base")) : single_vertex();
        auto cd = read_cellular(doc, g);
        auto rank = read_rank(doc);
        return CellularDoc{std::move(cd), LocalSystem(g, field, rank, read_transports(doc, g, field, rank, "transports", nullptr))};
    }
    if (kind == "fibration") return read_fibration(doc, field, o);
    doc.at("kind").fail("unknown kind '" + kind + "'");
}

Document read_document(const std::string& path, const ParseOptions& o) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_document(buf.str(), o);
}

std::string print_document(const Document& doc) {
    std::string out;
    emit(to_json(doc), 0, out);
    out += "\n";
    return out;
}

std::string kind_of(const Document& doc) {
    static const char* names[] = {"complex",  "filtered", "split",    "base_graph", "local_system",
                                  "subsystem", "morse",    "cellular", "fibration"};
    return names[doc.index()];
}

} // namespace fibss::io
