// Command-line front end. Exit codes: 0 ok, 2 parse, 3 invariant, 4 precondition.

#include <algorithm>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fibss/io.hpp"

using namespace fibss;

namespace {

struct Settings {
    std::optional<std::string> field;
    std::string format = "table";
    bool raw = false;
    std::optional<int> shift_n;
    std::optional<int> shift_k;
    int max_word_depth = 6;
};

io::ParseOptions parse_options(const Settings& s) {
    io::ParseOptions o;
    if (s.field) {
        try {
            o.field = FieldSpec::parse(*s.field);
        } catch (const std::invalid_argument& err) {
            throw ParseError(std::string("--field: ") + err.what());
        }
    }
    o.shift_n = s.shift_n;
    o.shift_k = s.shift_k;
    return o;
}

/// Filtered view of any document that determines a tower, with the display
/// offsets for p and for q.
struct Tower {
    FilteredComplex filtered;
    int shift_p = 0;
    int shift_q = 0;
};

Tower tower_of(const io::Document& doc) {
    if (auto c = std::get_if<CochainComplex>(&doc)) return {FilteredComplex(*c, {}), 0, c->display_shift()};
    if (auto f = std::get_if<FilteredComplex>(&doc)) return {*f, 0, f->complex().display_shift()};
    if (auto s = std::get_if<io::SplitDoc>(&doc)) return {s->complex.to_filtered(), 0, s->complex.complex().display_shift()};
    if (auto fd = std::get_if<FibrationData>(&doc)) return {assemble_fibration(*fd).to_filtered(), fd->shift_n(), fd->shift_k()};
    throw PreconditionError("a " + io::kind_of(doc) + " document does not determine a filtered complex");
}

CochainComplex complex_of(const io::Document& doc) {
    if (auto c = std::get_if<CochainComplex>(&doc)) return *c;
    if (auto f = std::get_if<FilteredComplex>(&doc)) return f->complex();
    if (auto s = std::get_if<io::SplitDoc>(&doc)) return s->complex.complex();
    if (auto m = std::get_if<io::MorseDoc>(&doc)) return morse_complex(m->data, m->system);
    if (auto c = std::get_if<io::CellularDoc>(&doc)) return cellular_complex(c->data, c->system);
    if (auto fd = std::get_if<FibrationData>(&doc)) return assemble_fibration(*fd).complex();
    throw PreconditionError("a " + io::kind_of(doc) + " document does not determine a cochain complex");
}

std::string pad(const std::string& s, std::size_t width) {
    return std::string(width > s.size() ? width - s.size() : 0, ' ') + s;
}

/// p grows to the right and q grows upwards.
void render_table(std::ostream& out, const std::string& title, const std::map<Bidegree, std::size_t>& dims,
                  int length, int shift_p, int shift_q) {
    out << title << "\n";
    int p_lo = 0, p_hi = length, q_lo = 0, q_hi = -1;
    bool any = false;
    for (const auto& [b, d] : dims) {
        if (d == 0) continue;
        p_lo = std::min(p_lo, b.p);
        p_hi = std::max(p_hi, b.p);
        q_lo = any ? std::min(q_lo, b.q) : b.q;
        q_hi = any ? std::max(q_hi, b.q) : b.q;
        any = true;
    }
    if (!any) {
        out << "  (zero)\n";
        return;
    }
    std::size_t w = 1, label = 3;
    for (int p = p_lo; p <= p_hi; ++p) w = std::max(w, std::to_string(p + shift_p).size());
    for (int q = q_lo; q <= q_hi; ++q) label = std::max(label, std::to_string(q + shift_q).size());
    for (const auto& [b, d] : dims) w = std::max(w, std::to_string(d).size());
    for (int q = q_hi; q >= q_lo; --q) {
        out << pad(std::to_string(q + shift_q), label) << " |";
        for (int p = p_lo; p <= p_hi; ++p) {
            auto it = dims.find({p, q});
            out << " " << pad(std::to_string(it == dims.end() ? 0 : it->second), w);
        }
        out << "\n";
    }
    out << std::string(label, '-') << "-+" << std::string((w + 1) * static_cast<std::size_t>(p_hi - p_lo + 1), '-')
        << "\n";
    out << pad("q\\p", label) << " |";
    for (int p = p_lo; p <= p_hi; ++p) out << " " << pad(std::to_string(p + shift_p), w);
    out << "\n";
}

void render_rows(std::ostream& out, int r, const std::map<Bidegree, std::size_t>& dims, const Settings& s,
                 int shift_p, int shift_q) {
    for (const auto& [b, d] : dims) {
        if (d == 0) continue;
        if (s.raw)
            out << r << " " << b.p + shift_p << " " << b.q + shift_q << " " << d << "\n";
        else
            out << r << "\t" << b.p + shift_p << "\t" << b.q + shift_q << "\t" << d << "\n";
    }
}

std::map<Bidegree, std::size_t> dims_of(const Page& page) {
    std::map<Bidegree, std::size_t> out;
    for (const auto& [b, e] : page.entries)
        if (e.dim > 0) out[b] = e.dim;
    return out;
}

void render_page(std::ostream& out, const Page& page, int length, const Settings& s, int shift_p, int shift_q) {
    if (s.raw || s.format == "tsv") {
        render_rows(out, page.r, dims_of(page), s, shift_p, shift_q);
        return;
    }
    render_table(out, "E_" + std::to_string(page.r), dims_of(page), length, shift_p, shift_q);
    for (const auto& [b, d] : page.differentials) {
        auto rank = mat_rank(d);
        if (rank == 0) continue;
        out << "d_" << page.r << " (" << b.p + shift_p << "," << b.q + shift_q << ") -> (" << b.p + page.r + shift_p
            << "," << b.q - page.r + 1 + shift_q << ") rank " << rank << "\n";
    }
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

bool degenerates_at_e2(SpectralSequence& ss) {
    for (int r = 2; r <= ss.filtered().length() + 1; ++r)
        if (!ss.page(r).differentials_vanish()) return false;
    return true;
}

void render_convergence(std::ostream& out, const ConvergenceReport& rep, int shift) {
    out << "r_stop " << rep.r_stop << "\n";
    out << "certified " << yes_no(rep.certified) << "\n";
    out << "degree\tH\tE_inf\n";
    std::set<int> degrees;
    for (auto [k, d] : rep.cohomology_dims) degrees.insert(k);
    for (auto [k, d] : rep.e_infinity_totals) degrees.insert(k);
    for (int k : degrees) {
        auto h = rep.cohomology_dims.count(k) ? rep.cohomology_dims.at(k) : 0;
        auto e = rep.e_infinity_totals.count(k) ? rep.e_infinity_totals.at(k) : 0;
        out << k + shift << "\t" << h << "\t" << e << "\n";
    }
    for (const auto& m : rep.mismatches) out << "mismatch " << m << "\n";
}

int cmd_homology(const std::string& file, const Settings& s) {
    auto complex = complex_of(io::read_document(file, parse_options(s)));
    auto h = cohomology(complex);
    const int shift = complex.display_shift();
    if (s.raw || s.format == "tsv") {
        if (!s.raw) std::cout << "degree\tdim\n";
        for (auto [k, d] : h.dims) std::cout << k + shift << (s.raw ? " " : "\t") << d << "\n";
    } else {
        for (auto [k, d] : h.dims) std::cout << "H^" << k + shift << " " << d << "\n";
    }
    return 0;
}

int cmd_pages(const std::string& file, std::optional<int> page_r, bool all, const Settings& s) {
    auto t = tower_of(io::read_document(file, parse_options(s)));
    SpectralSequence ss(t.filtered);
    const int n = t.filtered.length();
    if (!s.raw && s.format == "tsv") std::cout << "r\tp\tq\tdim\n";
    if (page_r && !all) {
        if (*page_r < 0) throw PreconditionError("--page must be nonnegative");
        render_page(std::cout, ss.page(*page_r), n, s, t.shift_p, t.shift_q);
        return 0;
    }
    for (int r = 1; r <= n + 1; ++r) {
        render_page(std::cout, ss.page(r), n, s, t.shift_p, t.shift_q);
        if (!s.raw && s.format != "tsv") std::cout << "\n";
    }
    if (s.raw || s.format == "tsv") return 0;
    auto rep = ss.converge();
    render_convergence(std::cout, rep, t.shift_p + t.shift_q);
    return rep.certified ? 0 : 3;
}

int cmd_e2(const std::string& file, const Settings& s) {
    auto doc = io::read_document(file, parse_options(s));
    auto fd = std::get_if<FibrationData>(&doc);
    if (!fd) throw PreconditionError("e2 needs a fibration document");
    auto table = e2_table(*fd);
    if (s.raw || s.format == "tsv") {
        if (!s.raw) std::cout << "r\tp\tq\tdim\n";
        render_rows(std::cout, 2, table.dims, s, table.shift_n, table.shift_k);
        return 0;
    }
    render_table(std::cout, "E_2 = H^p(B; H^q(F))", table.dims, fd->base().max_index(), table.shift_n,
                 table.shift_k);
    for (const auto& [q, ls] : table.coefficient_systems) {
        bool trivial = true;
        for (const auto& t : ls.transports())
            if (!(t == SparseMatrix::identity(ls.field(), ls.rank()))) trivial = false;
        std::cout << "H^" << q + table.shift_k << "(F): rank " << ls.rank() << ", "
                  << (trivial ? "trivial" : "nontrivial") << " transports\n";
    }
    std::cout << "page 2 agrees: yes\n";
    return 0;
}

int cmd_oracle_check(const std::string& file, const Settings& s) {
    auto t = tower_of(io::read_document(file, parse_options(s)));
    SpectralSequence ss(t.filtered);
    auto rep = ss.converge();
    render_convergence(std::cout, rep, t.shift_p + t.shift_q);
    std::cout << "degenerates at E_2: " << yes_no(degenerates_at_e2(ss)) << "\n";
    std::cout << "result: " << (rep.certified ? "pass" : "fail") << "\n";
    return rep.certified ? 0 : 3;
}

int cmd_extend(const std::string& sub_file, const std::optional<std::string>& base_file, const Settings& s) {
    auto o = parse_options(s);
    if (base_file) {
        auto base_doc = io::read_document(*base_file, o);
        auto g = std::get_if<BaseGraph>(&base_doc);
        if (!g) throw PreconditionError("the base file must hold a base_graph document");
        o.base = *g;
    }
    auto doc = io::read_document(sub_file, o);
    auto sub = std::get_if<LocalSubsystem>(&doc);
    if (!sub) throw PreconditionError("extend needs a subsystem document");
    ExtendOptions eo;
    eo.max_word_depth = s.max_word_depth;
    auto rep = extend_subsystem(*sub, eo);
    const auto& g = sub->base();
    std::cout << "base point " << g.vertices()[rep.base_point] << "\n";
    std::cout << "surjective " << to_string(rep.verdict) << "\n";
    for (std::size_t i = 0; i < rep.base_generators.size(); ++i) {
        std::cout << "generator " << g.format_path(rep.base_generators[i]);
        if (i < rep.monodromy.size()) std::cout << " -> " << rep.monodromy[i].to_string();
        std::cout << "\n";
    }
    if (rep.extension) {
        std::cout << "extension\n" << io::print_document(*rep.extension);
    } else {
        std::cout << "extension none\n";
    }
    return 0;
}

int cmd_compare(const std::string& cell_file, const std::string& fib_file, const Settings& s) {
    auto o = parse_options(s);
    auto cdoc = io::read_document(cell_file, o);
    auto fdoc = io::read_document(fib_file, o);
    auto cd = std::get_if<io::CellularDoc>(&cdoc);
    auto fd = std::get_if<FibrationData>(&fdoc);
    if (!cd || !fd) throw PreconditionError("compare-ls needs a cellular and a fibration document");
    auto cmp = leray_serre_compare(cd->data, *fd);
    for (int r = cmp.first_page; r <= cmp.last_page; ++r) {
        if (s.raw || s.format == "tsv") {
            render_rows(std::cout, r, cmp.fibration.at(r), s, fd->shift_n(), fd->shift_k());
            continue;
        }
        render_table(std::cout, "E_" + std::to_string(r) + " (fibration)", cmp.fibration.at(r),
                     cmp.last_page - 1, fd->shift_n(), fd->shift_k());
        std::cout << "cellular " << (cmp.cellular.at(r) == cmp.fibration.at(r) ? "equal" : "differs") << "\n\n";
    }
    for (const auto& d : cmp.differences) std::cout << "difference " << d << "\n";
    std::cout << "agree " << yes_no(cmp.agree) << "\n";
    return cmp.agree ? 0 : 3;
}

int cmd_kunneth(const std::string& base_file, const std::string& fiber_file, const Settings& s) {
    auto o = parse_options(s);
    auto base = io::read_document(base_file, o);
    auto fiber = io::read_document(fiber_file, o);
    auto b = std::get_if<CochainComplex>(&base);
    auto f = std::get_if<CochainComplex>(&fiber);
    if (!b || !f) throw PreconditionError("kunneth needs two complex documents");
    auto fd = product_fibration(*b, *f);
    FibrationData shifted(fd.base(), fd.system(), {}, s.shift_n.value_or(0), s.shift_k.value_or(0));
    std::cout << io::print_document(shifted);
    return 0;
}

int cmd_canon(const std::string& file, const Settings& s) {
    std::cout << io::print_document(io::read_document(file, parse_options(s)));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral sequences of filtered complexes, local systems and fibration models"};
    app.require_subcommand(1);
    app.fallthrough();
    Settings s;
    app.add_option("--field", s.field, "Override the document field (F2, F3, ..., Q)");
    app.add_option("--format", s.format, "Output format")->check(CLI::IsMember({"table", "tsv"}));
    app.add_flag("--raw", s.raw, "Emit machine-readable lines 'r p q dim'");
    app.add_option("--shift-n", s.shift_n, "Display shift of the base degree");
    app.add_option("--shift-k", s.shift_k, "Display shift of the fiber degree");
    app.add_option("--max-word-depth", s.max_word_depth, "Conjugate length searched by extend")
        ->check(CLI::Range(0, 64));

    std::string file, second;
    std::optional<std::string> base_file;
    std::optional<int> page_r;
    bool all = false;
    std::function<int()> run;

    auto homology = app.add_subcommand("homology", "Cohomology dimensions per degree");
    homology->add_option("file", file)->required();
    homology->callback([&] { run = [&] { return cmd_homology(file, s); }; });

    auto pages = app.add_subcommand("pages", "Pages of the spectral sequence");
    pages->add_option("file", file)->required();
    auto page_opt = pages->add_option("--page", page_r, "Single page r");
    pages->add_flag("--all", all, "Pages 1..n+1 and the convergence report")->excludes(page_opt);
    pages->callback([&] { run = [&] { return cmd_pages(file, page_r, all || !page_r, s); }; });

    auto e2 = app.add_subcommand("e2", "E_2 from the cohomology of the base with local coefficients");
    e2->add_option("file", file)->required();
    e2->callback([&] { run = [&] { return cmd_e2(file, s); }; });

    auto oracle = app.add_subcommand("oracle-check", "Compare E_inf totals with directly computed cohomology");
    oracle->add_option("file", file)->required();
    oracle->callback([&] { run = [&] { return cmd_oracle_check(file, s); }; });

    auto extend = app.add_subcommand("extend", "Extend a local subsystem to a local system");
    extend->add_option("subsystem", file)->required();
    extend->add_option("base", base_file, "Base graph document");
    extend->callback([&] { run = [&] { return cmd_extend(file, base_file, s); }; });

    auto compare = app.add_subcommand("compare-ls", "Compare a cellular model with a fibration tower");
    compare->add_option("cellular", file)->required();
    compare->add_option("fibration", second)->required();
    compare->callback([&] { run = [&] { return cmd_compare(file, second, s); }; });

    auto kunneth = app.add_subcommand("kunneth", "Product fibration document from a base and a fiber complex");
    kunneth->add_option("base", file)->required();
    kunneth->add_option("fiber", second)->required();
    kunneth->callback([&] { run = [&] { return cmd_kunneth(file, second, s); }; });

    auto canon = app.add_subcommand("canon", "Print the canonical form of a document");
    canon->add_option("file", file)->required();
    canon->callback([&] { run = [&] { return cmd_canon(file, s); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        std::cout.flush();
        int code = run();
        std::cout.flush();
        return code;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
