#pragma once

#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fibss/chaincore.hpp"

namespace fibss {

struct Bidegree {
    int p = 0;
    int q = 0;

    int total() const { return p + q; }
    auto operator<=>(const Bidegree&) const = default;
};

/// Decreasing filtration C = F_0 ⊇ F_1 ⊇ ... ⊇ F_n ⊇ F_{n+1} = 0 by
/// subcomplexes, given by spanning matrices in local coordinates of C^k.
class FilteredComplex {
public:
    /// spans[p-1][k] spans F_pC^k for p = 1..spans.size(); a missing degree
    /// means zero. Throws InvariantError unless the filtration is decreasing
    /// and preserved by the differential.
    FilteredComplex(CochainComplex complex, std::vector<std::map<int, SparseMatrix>> spans);

    /// F_pC spanned by the generators whose level is at least p.
    static FilteredComplex from_levels(CochainComplex complex, const std::vector<int>& levels, int length);

    const CochainComplex& complex() const { return complex_; }
    const FieldSpec& field() const { return complex_.field(); }
    int length() const { return length_; }
    /// Canonical basis of F_pC^k: all of C^k for p <= 0, zero for p > n.
    const SparseMatrix& subspace(int p, int k) const;

private:
    CochainComplex complex_;
    int length_;
    std::map<std::pair<int, int>, SparseMatrix> spaces_;  // (p, k) for 1 <= p <= n
    std::map<int, SparseMatrix> full_;
    std::map<int, SparseMatrix> none_;
    SparseMatrix empty_;
};

/// Complex with a chosen splitting C^k = ⊕_p C_p^k by blocks. The pieces
/// ∂_r of the differential map block p to block p+r.
class SplitFilteredComplex {
public:
    /// blocks[i] is the block of global generator i, in [0, length].
    /// Throws InvariantError if the differential lowers the block anywhere.
    SplitFilteredComplex(CochainComplex complex, std::vector<int> blocks, int length);
    SplitFilteredComplex(CochainComplex complex, std::vector<int> blocks);

    const CochainComplex& complex() const { return complex_; }
    const FieldSpec& field() const { return complex_.field(); }
    const std::vector<int>& blocks() const { return blocks_; }
    int length() const { return length_; }

    /// ∂_r as an N x N matrix on the global basis.
    SparseMatrix component(int r) const;
    /// D_r = ∂_0 + ... + ∂_r.
    SparseMatrix partial_sum(int r) const;
    /// Global indices of the generators of C_p^k.
    std::vector<std::size_t> generators_in(int p, int k) const;

    FilteredComplex to_filtered() const;

private:
    CochainComplex complex_;
    std::vector<int> blocks_;
    int length_;
    SparseMatrix global_;
};

struct PageEntry {
    std::size_t dim = 0;
    /// Columns in local coordinates of C^{p+q}; their classes form a basis.
    SparseMatrix representatives = SparseMatrix(FieldSpec::rationals(), 0, 0);
};

struct Page {
    int r = 0;
    FieldSpec field = FieldSpec::rationals();
    std::map<Bidegree, PageEntry> entries;
    /// d_r: E_r^{p,q} -> E_r^{p+r,q-r+1} in representative coordinates.
    std::map<Bidegree, SparseMatrix> differentials;
    /// Nonzero entries with a negative coordinate.
    std::vector<Bidegree> flagged;

    std::size_t dim(int p, int q) const;
    std::size_t dim(Bidegree b) const { return dim(b.p, b.q); }
    /// The differential leaving (p, q); a zero matrix if none is stored.
    SparseMatrix differential(int p, int q) const;
    std::map<int, std::size_t> total_dims() const;
    bool differentials_vanish() const;
};

struct ConvergenceReport {
    int r_stop = 1;
    std::map<Bidegree, std::size_t> e_infinity;
    /// dim F_pH^k keyed by (p, k), for p = 0..n+1.
    std::map<std::pair<int, int>, std::size_t> filtration_dims;
    std::map<int, std::size_t> cohomology_dims;
    std::map<int, std::size_t> e_infinity_totals;
    bool certified = false;
    std::vector<std::string> mismatches;
};

/// Lazily computed tower of pages for one filtered complex. Pages and the
/// cycle spaces behind them are cached; the caches are write-once per key and
/// guarded, so a SpectralSequence may be queried from several threads.
class SpectralSequence {
public:
    explicit SpectralSequence(FilteredComplex fc);

    const FilteredComplex& filtered() const { return fc_; }

    /// E_r. For r >= 1 the dimensions are checked against the cohomology of
    /// (E_{r-1}, d_{r-1}) and d_r∘d_r = 0 is checked; failures throw
    /// InvariantError.
    const Page& page(int r);

    /// Z_r^p in degree k: {x in F_pC^k : ∂x in F_{p+r}C^{k+1}}, with
    /// Z_r^p = F_p for r < 0.
    SparseMatrix cycles(int r, int p, int k);
    /// Z_{r-1}^{p+1} + ∂Z_{r-1}^{p-r+1}, the part of Z_r^p killed in E_r.
    SparseMatrix killed(int r, int p, int k);
    /// Coordinates in E_r^{p,k-p} of vectors lying in Z_r^p (local
    /// coordinates of C^k). Throws InvariantError otherwise.
    SparseMatrix class_coordinates(int r, int p, int k, const SparseMatrix& vectors);

    ConvergenceReport converge();

private:
    std::shared_ptr<const Page> compute_page(int r);
    SparseMatrix annihilator(int p, int k);

    FilteredComplex fc_;
    std::mutex mutex_;
    std::map<int, std::shared_ptr<const Page>> pages_;
    std::map<std::tuple<int, int, int>, SparseMatrix> cycles_;
    std::map<std::tuple<int, int, int>, SparseMatrix> killed_;
    std::map<std::pair<int, int>, SparseMatrix> annihilators_;
};

Page page(const FilteredComplex& fc, int r);
ConvergenceReport converge(const FilteredComplex& fc);

/// Zig-zag lift of alpha through the split pieces: betas[i-1] lies in
/// C_{p+i}, lift = alpha + Σ betas has ∂(lift) with no components in blocks
/// p..p+r-1, and image is its block p+r component, which represents d_r.
struct ZigzagResult {
    int p = 0;
    int degree = 0;
    std::vector<SparseMatrix> betas;
    SparseMatrix lift = SparseMatrix(FieldSpec::rationals(), 0, 0);
    SparseMatrix image = SparseMatrix(FieldSpec::rationals(), 0, 0);
};

/// alpha is an N x 1 global vector supported in one block and one degree
/// (PreconditionError otherwise). Returns nullopt when alpha does not survive
/// to E_r, i.e. the lifting system has no solution.
std::optional<ZigzagResult> zigzag_class_and_d(const SplitFilteredComplex& fc, int r, const SparseMatrix& alpha);

/// Page-by-page matrices of the morphism induced by a filtration-preserving
/// chain map, in the representative bases of the two towers.
struct SpectralSequenceMorphism {
    int last_page = 0;
    std::map<int, std::map<Bidegree, SparseMatrix>> pages;
};

/// Throws PreconditionError if f does not map F_p into F_p, and
/// InvariantError if a square with the page differentials fails to commute.
SpectralSequenceMorphism map_of_spectral_sequences(const ChainMap& f, SpectralSequence& source,
                                                   SpectralSequence& target);
SpectralSequenceMorphism map_of_spectral_sequences(const ChainMap& f, const FilteredComplex& source,
                                                   const FilteredComplex& target);

} // namespace fibss
