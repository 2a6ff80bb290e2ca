#include "fibss/specseq.hpp"

#include <algorithm>
#include <set>

namespace fibss {

namespace {

std::string at_bidegree(int p, int q) { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }

SparseMatrix unit_columns(FieldSpec field, std::size_t rows, const std::vector<std::size_t>& positions) {
    std::vector<SparseMatrix::Entry> entries;
    entries.reserve(positions.size());
    for (std::size_t j = 0; j < positions.size(); ++j) entries.push_back({positions[j], j, Scalar::from_int(field, 1)});
    return SparseMatrix::from_entries(field, rows, positions.size(), entries);
}

std::vector<std::size_t> first_n(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
}

// Basis of span(a) ∩ span(b) for matrices with independent columns.
SparseMatrix intersection(const SparseMatrix& a, const SparseMatrix& b) {
    auto k = mat_kernel(hstack({a, b}));
    return column_basis(a * k.select_rows(first_n(a.cols())));
}

// Coordinates on `reps` of vectors lying in span(reps) + span(killed).
SparseMatrix coordinates(const SparseMatrix& reps, const SparseMatrix& killed, const SparseMatrix& vectors,
                         const char* what) {
    auto x = mat_solve(hstack({reps, killed}), vectors);
    if (!x) throw InvariantError(std::string(what) + ": vector does not define a class on this page");
    return x->select_rows(first_n(reps.cols()));
}

} // namespace

// ---------------------------------------------------------------------------
// FilteredComplex

FilteredComplex::FilteredComplex(CochainComplex complex, std::vector<std::map<int, SparseMatrix>> spans)
    : complex_(std::move(complex)), length_(static_cast<int>(spans.size())),
      empty_(empty_columns(complex_.field(), 0)) {
    const auto& field = complex_.field();
    for (int k : complex_.degrees()) {
        full_.emplace(k, SparseMatrix::identity(field, complex_.dim(k)));
        none_.emplace(k, empty_columns(field, complex_.dim(k)));
    }
    for (int p = 1; p <= length_; ++p) {
        for (auto& [k, m] : spans[p - 1]) {
            if (m.rows() != complex_.dim(k))
                throw DimensionError("filtration span F_" + std::to_string(p) + "C^" + std::to_string(k) +
                                     " has " + std::to_string(m.rows()) + " rows, expected " +
                                     std::to_string(complex_.dim(k)));
            if (complex_.dim(k) == 0) continue;
            spaces_.emplace(std::make_pair(p, k), column_basis(m));
        }
    }
    for (int k : complex_.degrees()) {
        for (int p = 1; p <= length_; ++p) {
            if (!spans_contain(subspace(p - 1, k), subspace(p, k)))
                throw InvariantError("filtration is not decreasing: F_" + std::to_string(p) + "C^" +
                                     std::to_string(k) + " is not inside F_" + std::to_string(p - 1));
            const auto& f = subspace(p, k);
            if (f.cols() == 0 || complex_.dim(k + 1) == 0) continue;
            if (!spans_contain(subspace(p, k + 1), complex_.d(k) * f))
                throw InvariantError("differential does not preserve F_" + std::to_string(p) + " in degree " +
                                     std::to_string(k));
        }
    }
}

FilteredComplex FilteredComplex::from_levels(CochainComplex complex, const std::vector<int>& levels, int length) {
    const auto& basis = complex.basis();
    if (levels.size() != basis.size()) throw DimensionError("one filtration level per generator is required");
    std::vector<std::map<int, SparseMatrix>> spans(static_cast<std::size_t>(std::max(length, 0)));
    for (int p = 1; p <= length; ++p) {
        for (int k : complex.degrees()) {
            std::vector<std::size_t> positions;
            for (auto g : basis.in_degree(k))
                if (levels[g] >= p) positions.push_back(basis.local_index(g));
            spans[p - 1].emplace(k, unit_columns(complex.field(), complex.dim(k), positions));
        }
    }
    return FilteredComplex(std::move(complex), std::move(spans));
}

const SparseMatrix& FilteredComplex::subspace(int p, int k) const {
    auto full = full_.find(k);
    if (full == full_.end()) return empty_;
    if (p <= 0) return full->second;
    if (p > length_) return none_.at(k);
    auto it = spaces_.find({p, k});
    return it == spaces_.end() ? none_.at(k) : it->second;
}

// ---------------------------------------------------------------------------
// SplitFilteredComplex

SplitFilteredComplex::SplitFilteredComplex(CochainComplex complex, std::vector<int> blocks, int length)
    : complex_(std::move(complex)), blocks_(std::move(blocks)), length_(length),
      global_(complex_.global_differential()) {
    const auto& basis = complex_.basis();
    if (blocks_.size() != basis.size()) throw DimensionError("one block per generator is required");
    if (length_ < 0) throw InvariantError("filtration length must be nonnegative");
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i] < 0 || blocks_[i] > length_)
            throw InvariantError("generator '" + basis[i].id + "' has block " + std::to_string(blocks_[i]) +
                                 " outside [0, " + std::to_string(length_) + "]");
    for (const auto& e : global_.entries())
        if (blocks_[e.row] < blocks_[e.col])
            throw InvariantError("differential lowers the block from '" + basis[e.col].id + "' (block " +
                                 std::to_string(blocks_[e.col]) + ") to '" + basis[e.row].id + "' (block " +
                                 std::to_string(blocks_[e.row]) + ")");
}

SplitFilteredComplex::SplitFilteredComplex(CochainComplex complex, std::vector<int> blocks)
    : SplitFilteredComplex(std::move(complex), blocks,
                           blocks.empty() ? 0 : *std::max_element(blocks.begin(), blocks.end())) {}

SparseMatrix SplitFilteredComplex::component(int r) const {
    std::vector<SparseMatrix::Entry> entries;
    for (auto& e : global_.entries())
        if (blocks_[e.row] - blocks_[e.col] == r) entries.push_back(std::move(e));
    return SparseMatrix::from_entries(field(), global_.rows(), global_.cols(), entries);
}

SparseMatrix SplitFilteredComplex::partial_sum(int r) const {
    std::vector<SparseMatrix::Entry> entries;
    for (auto& e : global_.entries())
        if (blocks_[e.row] - blocks_[e.col] <= r) entries.push_back(std::move(e));
    return SparseMatrix::from_entries(field(), global_.rows(), global_.cols(), entries);
}

std::vector<std::size_t> SplitFilteredComplex::generators_in(int p, int k) const {
    std::vector<std::size_t> out;
    for (auto g : complex_.basis().in_degree(k))
        if (blocks_[g] == p) out.push_back(g);
    return out;
}

FilteredComplex SplitFilteredComplex::to_filtered() const {
    return FilteredComplex::from_levels(complex_, blocks_, length_);
}

// ---------------------------------------------------------------------------
// Page

std::size_t Page::dim(int p, int q) const {
    auto it = entries.find({p, q});
    return it == entries.end() ? 0 : it->second.dim;
}

SparseMatrix Page::differential(int p, int q) const {
    auto it = differentials.find({p, q});
    if (it != differentials.end()) return it->second;
    return SparseMatrix(field, dim(p + r, q - r + 1), dim(p, q));
}

std::map<int, std::size_t> Page::total_dims() const {
    std::map<int, std::size_t> out;
    for (const auto& [b, e] : entries) out[b.total()] += e.dim;
    return out;
}

bool Page::differentials_vanish() const {
    return std::all_of(differentials.begin(), differentials.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

// ---------------------------------------------------------------------------
// SpectralSequence

SpectralSequence::SpectralSequence(FilteredComplex fc) : fc_(std::move(fc)) {}

SparseMatrix SpectralSequence::annihilator(int p, int k) {
    {
        std::lock_guard lock(mutex_);
        auto it = annihilators_.find({p, k});
        if (it != annihilators_.end()) return it->second;
    }
    const auto& space = fc_.subspace(p, k);
    auto rows = mat_kernel(space.transpose()).transpose();
    std::lock_guard lock(mutex_);
    return annihilators_.try_emplace({p, k}, std::move(rows)).first->second;
}

SparseMatrix SpectralSequence::cycles(int r, int p, int k) {
    const int n = fc_.length();
    if (r < 0 || p + r <= 0 || p > n) return fc_.subspace(p, k);
    r = std::min(r, n + 1 - p);
    const auto key = std::make_tuple(r, p, k);
    {
        std::lock_guard lock(mutex_);
        auto it = cycles_.find(key);
        if (it != cycles_.end()) return it->second;
    }
    const auto& source = fc_.subspace(p, k);
    SparseMatrix z = source;
    if (source.cols() > 0 && fc_.complex().dim(k + 1) > 0) {
        auto outside = annihilator(p + r, k + 1);
        if (outside.rows() > 0) {
            auto kernel = mat_kernel(outside * (fc_.complex().d(k) * source));
            z = column_basis(source * kernel);
        }
    }
    std::lock_guard lock(mutex_);
    return cycles_.try_emplace(key, std::move(z)).first->second;
}

SparseMatrix SpectralSequence::killed(int r, int p, int k) {
    const auto key = std::make_tuple(r, p, k);
    {
        std::lock_guard lock(mutex_);
        auto it = killed_.find(key);
        if (it != killed_.end()) return it->second;
    }
    auto lower = cycles(r - 1, p + 1, k);
    auto from = cycles(r - 1, p - r + 1, k - 1);
    SparseMatrix d = lower;
    if (from.cols() > 0) d = column_basis(hstack({lower, fc_.complex().d(k - 1) * from}));
    std::lock_guard lock(mutex_);
    return killed_.try_emplace(key, std::move(d)).first->second;
}

SparseMatrix SpectralSequence::class_coordinates(int r, int p, int k, const SparseMatrix& vectors) {
    const auto& pg = page(r);
    auto it = pg.entries.find({p, k - p});
    if (it == pg.entries.end()) {
        if (vectors.rows() != fc_.complex().dim(k)) throw DimensionError("vectors have the wrong length");
        return SparseMatrix(fc_.field(), 0, vectors.cols());
    }
    if (!spans_contain(cycles(r, p, k), vectors))
        throw InvariantError("vectors do not lie in Z_" + std::to_string(r) + " at " + at_bidegree(p, k - p));
    return coordinates(it->second.representatives, killed(r, p, k), vectors, "class_coordinates");
}

const Page& SpectralSequence::page(int r) {
    if (r < 0) throw PreconditionError("page index must be nonnegative");
    {
        std::lock_guard lock(mutex_);
        auto it = pages_.find(r);
        if (it != pages_.end()) return *it->second;
    }
    auto computed = compute_page(r);
    std::lock_guard lock(mutex_);
    return *pages_.try_emplace(r, std::move(computed)).first->second;
}

std::shared_ptr<const Page> SpectralSequence::compute_page(int r) {
    const auto& c = fc_.complex();
    const int n = fc_.length();
    auto out = std::make_shared<Page>();
    out->r = r;
    out->field = c.field();

    std::map<Bidegree, SparseMatrix> killed_at;
    for (int p = 0; p <= n; ++p) {
        for (int k : c.degrees()) {
            auto z = cycles(r, p, k);
            auto b = killed(r, p, k);
            if (!spans_contain(z, b))
                throw InvariantError("engine: B_r not inside Z_r at " + at_bidegree(p, k - p) + " on page " +
                                     std::to_string(r));
            auto reps = complement_columns(b, z);
            if (reps.cols() == 0) continue;
            Bidegree at{p, k - p};
            if (at.q < 0) out->flagged.push_back(at);
            out->entries.emplace(at, PageEntry{reps.cols(), std::move(reps)});
            killed_at.emplace(at, std::move(b));
        }
    }

    for (const auto& [at, entry] : out->entries) {
        const int k = at.total();
        Bidegree to{at.p + r, at.q - r + 1};
        auto target = out->entries.find(to);
        if (target == out->entries.end()) continue;
        auto images = c.d(k) * entry.representatives;
        out->differentials.emplace(
            at, coordinates(target->second.representatives, killed_at.at(to), images, "page differential"));
    }

    for (const auto& [at, d] : out->differentials) {
        Bidegree to{at.p + r, at.q - r + 1};
        if (!(out->differential(to.p, to.q) * d).is_zero())
            throw InvariantError("engine: d_" + std::to_string(r) + " squares to nonzero at " + at_bidegree(at.p, at.q));
    }

    if (r >= 1) {
        const auto& prev = page(r - 1);
        const int s = r - 1;
        std::set<Bidegree> cells;
        for (const auto& [b, e] : prev.entries) cells.insert(b);
        for (const auto& [b, e] : out->entries) cells.insert(b);
        for (const auto& b : cells) {
            const auto before = prev.dim(b);
            const auto outgoing = mat_rank(prev.differential(b.p, b.q));
            const auto incoming = mat_rank(prev.differential(b.p - s, b.q + s - 1));
            if (before - outgoing - incoming != out->dim(b))
                throw InvariantError("engine: E_" + std::to_string(r) + at_bidegree(b.p, b.q) + " has dimension " +
                                     std::to_string(out->dim(b)) + " but H(E_" + std::to_string(s) + ") has " +
                                     std::to_string(before - outgoing - incoming));
        }
    }
    return out;
}

ConvergenceReport SpectralSequence::converge() {
    const auto& c = fc_.complex();
    const int n = fc_.length();
    ConvergenceReport report;

    std::vector<const Page*> pages;
    for (int r = 0; r <= n + 1; ++r) pages.push_back(&page(r));
    report.r_stop = n + 1;
    while (report.r_stop > 1 && pages[report.r_stop - 1]->differentials_vanish()) --report.r_stop;
    if (n + 1 < 1) report.r_stop = 1;

    const auto& last = *pages.back();
    for (const auto& [b, e] : last.entries) {
        report.e_infinity[b] = e.dim;
        report.e_infinity_totals[b.total()] += e.dim;
    }
    const auto& stable = *pages[std::min<std::size_t>(report.r_stop, pages.size() - 1)];
    for (const auto& [b, e] : last.entries)
        if (stable.dim(b) != e.dim)
            report.mismatches.push_back("E_" + std::to_string(report.r_stop) + " differs from E_inf at " +
                                        at_bidegree(b.p, b.q));

    auto h = cohomology(c);
    for (int k : c.degrees()) {
        report.cohomology_dims[k] = h.dim(k);
        auto closed = mat_kernel(c.d(k));
        auto exact = column_basis(c.d(k - 1));
        const auto exact_rank = exact.cols();
        for (int p = 0; p <= n + 1; ++p) {
            auto inside = intersection(closed, fc_.subspace(p, k));
            report.filtration_dims[{p, k}] = mat_rank(hstack({inside, exact})) - exact_rank;
        }
    }

    for (int k : c.degrees()) {
        std::size_t total = 0;
        for (int p = 0; p <= n; ++p) {
            const auto graded = report.filtration_dims[{p, k}] - report.filtration_dims[{p + 1, k}];
            const auto e = last.dim(p, k - p);
            total += e;
            if (graded != e)
                report.mismatches.push_back("E_inf" + at_bidegree(p, k - p) + " = " + std::to_string(e) +
                                            " but F_pH/F_p+1H = " + std::to_string(graded));
        }
        if (total != h.dim(k))
            report.mismatches.push_back("E_inf total in degree " + std::to_string(k) + " is " + std::to_string(total) +
                                        " but H^" + std::to_string(k) + " = " + std::to_string(h.dim(k)));
        if (report.filtration_dims[{0, k}] != h.dim(k))
            report.mismatches.push_back("F_0H^" + std::to_string(k) + " differs from H^" + std::to_string(k));
    }
    report.certified = report.mismatches.empty();
    return report;
}

Page page(const FilteredComplex& fc, int r) {
    SpectralSequence ss(fc);
    return ss.page(r);
}

ConvergenceReport converge(const FilteredComplex& fc) {
    SpectralSequence ss(fc);
    return ss.converge();
}

// ---------------------------------------------------------------------------
// Zig-zag

std::optional<ZigzagResult> zigzag_class_and_d(const SplitFilteredComplex& fc, int r, const SparseMatrix& alpha) {
    const auto& c = fc.complex();
    const auto& basis = c.basis();
    const auto n = basis.size();
    const auto& field = fc.field();
    if (r < 0) throw PreconditionError("page index must be nonnegative");
    if (alpha.rows() != n || alpha.cols() != 1) throw PreconditionError("alpha must be a single global column vector");
    auto support = alpha.entries();
    if (support.empty()) throw PreconditionError("alpha must be nonzero");
    const int p = fc.blocks()[support.front().row];
    const int k = basis[support.front().row].degree;
    for (const auto& e : support)
        if (fc.blocks()[e.row] != p || basis[e.row].degree != k)
            throw PreconditionError("alpha is not supported in a single block and degree");

    ZigzagResult out;
    out.p = p;
    out.degree = k;
    std::vector<SparseMatrix> parts;
    for (int s = 0; s <= r; ++s) parts.push_back(fc.component(s));

    // Unknowns: β_{p+i} for 1 <= i < r. Equations: the components of ∂(α + Σβ)
    // in blocks p .. p+r-1 vanish, i.e. D_{j}α + Σ_i ∂_{j-i} β_{p+i} = 0 in block p+j.
    std::vector<std::size_t> rows, unknowns;
    std::vector<int> unknown_block;
    for (int j = 0; j < r; ++j)
        for (auto g : fc.generators_in(p + j, k + 1)) rows.push_back(g);
    for (int i = 1; i < r; ++i)
        for (auto g : fc.generators_in(p + i, k)) {
            unknowns.push_back(g);
            unknown_block.push_back(i);
        }

    SparseMatrix lift = alpha;
    if (!rows.empty()) {
        std::vector<SparseMatrix::Entry> system;
        for (std::size_t col = 0; col < unknowns.size(); ++col) {
            const int i = unknown_block[col];
            auto image = SparseMatrix(field, n, 1);
            for (int s = 0; s + i < r; ++s) image = image + parts[s].column(unknowns[col]);
            for (auto& e : image.select_rows(rows).entries()) system.push_back({e.row, col, e.value});
        }
        auto m = SparseMatrix::from_entries(field, rows.size(), unknowns.size(), system);
        SparseMatrix rhs(field, n, 1);
        for (int s = 0; s < r; ++s) rhs = rhs + parts[s] * alpha;
        rhs = rhs.select_rows(rows).scaled(Scalar::from_int(field, -1));
        auto beta = mat_solve(m, rhs);
        if (!beta) return std::nullopt;
        auto spread = beta->embed_rows(n, unknowns);
        for (int i = 1; i < r; ++i) {
            std::vector<std::size_t> mine;
            for (std::size_t col = 0; col < unknowns.size(); ++col)
                if (unknown_block[col] == i) mine.push_back(unknowns[col]);
            std::vector<SparseMatrix::Entry> entries;
            for (auto g : mine) {
                auto v = spread.at(g, 0);
                if (!v.is_zero()) entries.push_back({g, 0, v});
            }
            out.betas.push_back(SparseMatrix::from_entries(field, n, 1, entries));
        }
        lift = alpha + spread;
    } else {
        for (int i = 1; i < r; ++i) out.betas.emplace_back(field, n, 1);
    }

    // d_r[α] = ∂_r α + ∂_{r-1} β_{p+1} + ... + ∂_1 β_{p+r-1}.
    auto image = parts[r] * alpha;
    for (int i = 1; i < r; ++i) image = image + parts[r - i] * out.betas[i - 1];
    out.lift = std::move(lift);
    out.image = std::move(image);
    return out;
}

// ---------------------------------------------------------------------------
// Morphisms

SpectralSequenceMorphism map_of_spectral_sequences(const ChainMap& f, SpectralSequence& source,
                                                   SpectralSequence& target) {
    const auto& src = source.filtered();
    const auto& tgt = target.filtered();
    if (!(f.source() == src.complex()) || !(f.target() == tgt.complex()))
        throw DimensionError("chain map does not match the filtered complexes");
    const int n = std::max(src.length(), tgt.length());
    for (int k : src.complex().degrees())
        for (int p = 1; p <= n; ++p) {
            const auto& from = src.subspace(p, k);
            if (from.cols() == 0) continue;
            if (!spans_contain(tgt.subspace(p, k), f.block(k) * from))
                throw PreconditionError("chain map does not preserve F_" + std::to_string(p) + " in degree " +
                                        std::to_string(k));
        }

    SpectralSequenceMorphism out;
    out.last_page = n + 1;
    for (int r = 0; r <= n + 1; ++r) {
        const auto& ps = source.page(r);
        const auto& pt = target.page(r);
        auto& maps = out.pages[r];
        std::set<Bidegree> cells;
        for (const auto& [b, e] : ps.entries) cells.insert(b);
        for (const auto& [b, e] : pt.entries) cells.insert(b);
        for (const auto& b : cells) {
            auto it = ps.entries.find(b);
            if (it == ps.entries.end()) {
                maps.emplace(b, SparseMatrix(src.field(), pt.dim(b), 0));
                continue;
            }
            auto images = f.block(b.total()) * it->second.representatives;
            maps.emplace(b, target.class_coordinates(r, b.p, b.total(), images));
        }
        auto map_at = [&](Bidegree b) {
            auto it = maps.find(b);
            return it != maps.end() ? it->second : SparseMatrix(src.field(), pt.dim(b), ps.dim(b));
        };
        for (const auto& b : cells) {
            Bidegree to{b.p + r, b.q - r + 1};
            auto lhs = map_at(to) * ps.differential(b.p, b.q);
            auto rhs = pt.differential(b.p, b.q) * map_at(b);
            if (!(lhs == rhs))
                throw InvariantError("induced map does not commute with d_" + std::to_string(r) + " at " +
                                     at_bidegree(b.p, b.q));
        }
    }
    return out;
}

SpectralSequenceMorphism map_of_spectral_sequences(const ChainMap& f, const FilteredComplex& source,
                                                   const FilteredComplex& target) {
    SpectralSequence s(source), t(target);
    return map_of_spectral_sequences(f, s, t);
}

} // namespace fibss
