#include "fibss/chaincore.hpp"

#include <set>

namespace fibss {

GradedBasis::GradedBasis(std::vector<Generator> generators) : generators_(std::move(generators)) {
    local_.resize(generators_.size());
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        const auto& g = generators_[i];
        if (!index_.emplace(g.id, i).second) throw InvariantError("duplicate generator id '" + g.id + "'");
        auto& slot = by_degree_[g.degree];
        local_[i] = slot.size();
        slot.push_back(i);
    }
}

std::optional<std::size_t> GradedBasis::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::vector<std::size_t>& GradedBasis::in_degree(int k) const {
    static const std::vector<std::size_t> none;
    auto it = by_degree_.find(k);
    return it == by_degree_.end() ? none : it->second;
}

std::vector<int> GradedBasis::degrees() const {
    std::vector<int> out;
    for (const auto& [k, v] : by_degree_) out.push_back(k);
    return out;
}

CochainComplex::CochainComplex(FieldSpec field, GradedBasis basis, std::map<int, SparseMatrix> differential,
                               int display_shift)
    : field_(field), basis_(std::move(basis)), display_shift_(display_shift) {
    for (auto& [k, m] : differential) {
        if (!(m.field() == field_)) throw DimensionError("differential in degree " + std::to_string(k) + " over wrong field");
        if (m.rows() != basis_.dim(k + 1) || m.cols() != basis_.dim(k))
            throw DimensionError("differential from degree " + std::to_string(k) + " has shape " +
                                 std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                                 std::to_string(basis_.dim(k + 1)) + "x" + std::to_string(basis_.dim(k)));
        if (!m.is_zero()) differential_.emplace(k, std::move(m));
    }
    for (const auto& [k, m] : differential_) {
        auto next = differential_.find(k + 1);
        if (next == differential_.end()) continue;
        if (!(next->second * m).is_zero())
            throw InvariantError("d^2 != 0 from degree " + std::to_string(k) + " to degree " + std::to_string(k + 2));
    }
}

CochainComplex CochainComplex::from_global(FieldSpec field, GradedBasis basis, const SparseMatrix& global,
                                           int display_shift) {
    if (global.rows() != basis.size() || global.cols() != basis.size())
        throw DimensionError("global differential must be square of the basis size");
    std::map<int, std::vector<SparseMatrix::Entry>> blocks;
    for (auto& e : global.entries()) {
        const auto& src = basis[e.col];
        const auto& dst = basis[e.row];
        if (dst.degree != src.degree + 1)
            throw InvariantError("differential maps '" + src.id + "' (degree " + std::to_string(src.degree) +
                                 ") to '" + dst.id + "' (degree " + std::to_string(dst.degree) + ")");
        blocks[src.degree].push_back({basis.local_index(e.row), basis.local_index(e.col), e.value});
    }
    std::map<int, SparseMatrix> differential;
    for (auto& [k, entries] : blocks)
        differential.emplace(k, SparseMatrix::from_entries(field, basis.dim(k + 1), basis.dim(k), entries));
    return CochainComplex(field, std::move(basis), std::move(differential), display_shift);
}

SparseMatrix CochainComplex::d(int k) const {
    auto it = differential_.find(k);
    if (it != differential_.end()) return it->second;
    return SparseMatrix(field_, basis_.dim(k + 1), basis_.dim(k));
}

SparseMatrix CochainComplex::global_differential() const {
    std::vector<SparseMatrix::Entry> entries;
    for (const auto& [k, m] : differential_) {
        const auto& src = basis_.in_degree(k);
        const auto& dst = basis_.in_degree(k + 1);
        for (auto& e : m.entries()) entries.push_back({dst[e.row], src[e.col], e.value});
    }
    return SparseMatrix::from_entries(field_, basis_.size(), basis_.size(), entries);
}

bool CochainComplex::operator==(const CochainComplex& rhs) const {
    return field_ == rhs.field_ && basis_ == rhs.basis_ && differential_ == rhs.differential_ &&
           display_shift_ == rhs.display_shift_;
}

std::size_t CohomologyResult::dim(int k) const {
    auto it = dims.find(k);
    return it == dims.end() ? 0 : it->second;
}

long long CohomologyResult::euler_characteristic() const {
    long long chi = 0;
    for (const auto& [k, d] : dims) chi += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(d);
    return chi;
}

CohomologyResult cohomology(const CochainComplex& c) {
    CohomologyResult out;
    out.field = c.field();
    for (int k : c.degrees()) {
        auto cocycles = column_basis(mat_kernel(c.d(k)));
        auto boundaries = column_basis(c.d(k - 1));
        auto reps = complement_columns(boundaries, cocycles);
        out.dims[k] = reps.cols();
        out.representatives.emplace(k, std::move(reps));
        out.boundaries.emplace(k, std::move(boundaries));
    }
    return out;
}

SparseMatrix class_coordinates(const CohomologyResult& result, int k, const SparseMatrix& cocycles) {
    auto reps = result.representatives.find(k);
    if (reps == result.representatives.end()) {
        if (cocycles.rows() != 0) throw DimensionError("no generators in degree " + std::to_string(k));
        return SparseMatrix(result.field, 0, cocycles.cols());
    }
    const auto& bounds = result.boundaries.at(k);
    auto x = mat_solve(hstack({reps->second, bounds}), cocycles);
    if (!x) throw InvariantError("vector is not a cocycle in degree " + std::to_string(k));
    std::vector<std::size_t> top(reps->second.cols());
    for (std::size_t i = 0; i < top.size(); ++i) top[i] = i;
    return x->select_rows(top);
}

long long euler_characteristic(const CochainComplex& c) {
    long long chi = 0;
    for (int k : c.degrees()) chi += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(c.dim(k));
    return chi;
}

CochainComplex tensor_product(const CochainComplex& a, const CochainComplex& b) {
    if (!(a.field() == b.field()))
        throw DimensionError("tensor product of complexes over " + a.field().name() + " and " + b.field().name());
    const auto& field = a.field();
    const auto& ba = a.basis();
    const auto& bb = b.basis();
    std::vector<Generator> gens;
    gens.reserve(ba.size() * bb.size());
    for (const auto& x : ba.generators())
        for (const auto& y : bb.generators()) gens.push_back({x.id + "*" + y.id, x.degree + y.degree});
    GradedBasis basis(std::move(gens));
    auto index = [&](std::size_t i, std::size_t j) { return i * bb.size() + j; };

    auto da = a.global_differential();
    auto db = b.global_differential();
    std::vector<SparseMatrix::Entry> entries;
    for (auto& e : da.entries())
        for (std::size_t j = 0; j < bb.size(); ++j) entries.push_back({index(e.row, j), index(e.col, j), e.value});
    for (auto& e : db.entries())
        for (std::size_t i = 0; i < ba.size(); ++i) {
            auto v = ba[i].degree % 2 == 0 ? e.value : -e.value;
            entries.push_back({index(i, e.row), index(i, e.col), v});
        }
    auto global = SparseMatrix::from_entries(field, basis.size(), basis.size(), entries);
    return CochainComplex::from_global(field, std::move(basis), global, a.display_shift() + b.display_shift());
}

ChainMap::ChainMap(CochainComplex source, CochainComplex target, std::map<int, SparseMatrix> blocks)
    : source_(std::move(source)), target_(std::move(target)) {
    if (!(source_.field() == target_.field())) throw DimensionError("chain map between complexes over different fields");
    for (auto& [k, m] : blocks) {
        if (m.rows() != target_.dim(k) || m.cols() != source_.dim(k))
            throw DimensionError("chain map block in degree " + std::to_string(k) + " has wrong shape");
        if (!m.is_zero()) blocks_.emplace(k, std::move(m));
    }
    for (int k : source_.degrees()) {
        // d_target f_k == f_{k+1} d_source
        auto lhs = target_.d(k) * block(k);
        auto rhs = block(k + 1) * source_.d(k);
        if (!(lhs == rhs))
            throw InvariantError("chain map does not commute with the differentials in degree " + std::to_string(k));
    }
}

ChainMap ChainMap::identity(const CochainComplex& c) {
    std::map<int, SparseMatrix> blocks;
    for (int k : c.degrees()) blocks.emplace(k, SparseMatrix::identity(c.field(), c.dim(k)));
    return ChainMap(c, c, std::move(blocks));
}

ChainMap ChainMap::zero(const CochainComplex& source, const CochainComplex& target) {
    return ChainMap(source, target, {});
}

SparseMatrix ChainMap::block(int k) const {
    auto it = blocks_.find(k);
    if (it != blocks_.end()) return it->second;
    return SparseMatrix(source_.field(), target_.dim(k), source_.dim(k));
}

std::map<int, SparseMatrix> induced_map_on_cohomology(const ChainMap& f) {
    auto hs = cohomology(f.source());
    auto ht = cohomology(f.target());
    std::map<int, SparseMatrix> out;
    std::set<int> degrees;
    for (int k : f.source().degrees()) degrees.insert(k);
    for (int k : f.target().degrees()) degrees.insert(k);
    for (int k : degrees) {
        auto src_dim = hs.dim(k);
        if (src_dim == 0 || ht.dim(k) == 0) {
            out.emplace(k, SparseMatrix(f.source().field(), ht.dim(k), src_dim));
            continue;
        }
        auto images = f.block(k) * hs.representatives.at(k);
        out.emplace(k, class_coordinates(ht, k, images));
    }
    return out;
}

} // namespace fibss
