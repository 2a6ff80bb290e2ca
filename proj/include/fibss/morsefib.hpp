#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fibss/chaincore.hpp"
#include "fibss/localsys.hpp"
#include "fibss/specseq.hpp"

namespace fibss {

struct CriticalPoint {
    std::string id;
    int index = 0;
    /// Base graph vertex carrying the fiber over this point.
    std::size_t vertex = 0;

    bool operator==(const CriticalPoint&) const = default;
};

/// Gradient trajectory from `from` to `to` (the differential raises the
/// index). `word` runs in the base graph from the vertex of `from` to the
/// vertex of `to`; transport along it carries the fiber over the source
/// of the differential to the fiber over its target.
struct Trajectory {
    std::string id;
    std::size_t from = 0;
    std::size_t to = 0;
    int sign = 1;
    EdgePath word;

    bool operator==(const Trajectory&) const = default;
};

class MorseData {
public:
    /// Throws InvariantError on bad signs, unknown points, or words that do
    /// not join the two points' vertices.
    MorseData(BaseGraph base, std::vector<CriticalPoint> points, std::vector<Trajectory> trajectories);

    const BaseGraph& base() const { return base_; }
    const std::vector<CriticalPoint>& points() const { return points_; }
    const std::vector<Trajectory>& trajectories() const { return trajectories_; }
    std::optional<std::size_t> point_index(const std::string& id) const;
    int max_index() const;

    bool operator==(const MorseData&) const = default;

private:
    BaseGraph base_;
    std::vector<CriticalPoint> points_;
    std::vector<Trajectory> trajectories_;
};

/// Generators x*j (point x, fiber basis vector j) in degree index(x), with
/// ∂(m<x>) = Σ_γ n_γ Φ_γ(m) <y> over trajectories γ from x to y of index
/// difference one. Throws InvariantError naming the points where ∂² != 0.
CochainComplex morse_complex(const MorseData& md, const LocalSystem& ls);

struct Cell {
    std::string id;
    int dim = 0;
    std::size_t vertex = 0;

    bool operator==(const Cell&) const = default;
};

/// [lower : upper] with the transport word from the vertex of the lower
/// cell to the vertex of the upper cell.
struct Incidence {
    std::size_t lower = 0;
    std::size_t upper = 0;
    long long number = 0;
    EdgePath word;

    bool operator==(const Incidence&) const = default;
};

/// Endpoints of a 1-cell. The coboundary of m<e0> picks up
/// Φ⁺(m) - Φ⁻(m) on the 1-cell, which for a loop replaces the vanishing
/// incidence number.
struct CellEnds {
    std::size_t cell = 0;
    std::size_t minus = 0;
    EdgePath minus_word;
    std::size_t plus = 0;
    EdgePath plus_word;

    bool operator==(const CellEnds&) const = default;
};

class CellularData {
public:
    /// Throws InvariantError when dimensions or words do not fit, or when
    /// the untwisted incidence complex has ∂² != 0.
    CellularData(BaseGraph base, std::vector<Cell> cells, std::vector<Incidence> incidences,
                 std::vector<CellEnds> ends = {}, std::optional<std::vector<int>> levels = std::nullopt);

    const BaseGraph& base() const { return base_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Incidence>& incidences() const { return incidences_; }
    const std::vector<CellEnds>& ends() const { return ends_; }
    /// Base-skeleton level per cell, for the filtered cellular model.
    const std::optional<std::vector<int>>& levels() const { return levels_; }

    bool operator==(const CellularData&) const = default;

private:
    BaseGraph base_;
    std::vector<Cell> cells_;
    std::vector<Incidence> incidences_;
    std::vector<CellEnds> ends_;
    std::optional<std::vector<int>> levels_;
};

/// Twisted cellular cochains: δ(m<e_i>) = Σ_j [e_i : e_j] Φ_ij(m) <e_j>, with
/// the endpoint clause for 1-cells. Throws InvariantError if ∂² != 0.
CochainComplex cellular_complex(const CellularData& cd, const LocalSystem& ls);

/// Local system of fiber cochain complexes: each edge acts by an invertible
/// degree-preserving chain map (a global N x N matrix on the fiber basis).
/// Relations need only hold on cohomology.
class ChainLocalSystem {
public:
    ChainLocalSystem(BaseGraph base, CochainComplex fiber, std::vector<SparseMatrix> actions);
    static ChainLocalSystem trivial(BaseGraph base, CochainComplex fiber);

    const BaseGraph& base() const { return base_; }
    const CochainComplex& fiber() const { return fiber_; }
    const std::vector<SparseMatrix>& actions() const { return actions_; }

    /// Chain-level transport, composed in traversal order.
    SparseMatrix transport(const EdgePath& path) const;
    /// The action of a global N x N matrix on H^q of the fiber, in the
    /// representative basis.
    SparseMatrix on_cohomology(const SparseMatrix& chain_map, int q) const;
    /// Local system with fiber H^q(F) for every fiber degree q. Throws
    /// InvariantError if a relation fails on cohomology.
    std::map<int, LocalSystem> cohomology_systems() const;

    bool operator==(const ChainLocalSystem& rhs) const;

private:
    BaseGraph base_;
    CochainComplex fiber_;
    std::vector<SparseMatrix> actions_;
    std::vector<SparseMatrix> inverses_;
    CohomologyResult h_;
};

/// Block ∂_r from the fiber over `from` to the fiber over `to`, r =
/// index(to) - index(from) >= 2, mapping fiber degree q to q + 1 - r.
struct Correction {
    std::size_t from = 0;
    std::size_t to = 0;
    SparseMatrix block = SparseMatrix(FieldSpec::rationals(), 0, 0);

    bool operator==(const Correction&) const = default;
};

class FibrationData {
public:
    FibrationData(MorseData base, ChainLocalSystem system, std::vector<Correction> corrections = {}, int shift_n = 0,
                  int shift_k = 0);

    const MorseData& base() const { return base_; }
    const ChainLocalSystem& system() const { return system_; }
    const CochainComplex& fiber() const { return system_.fiber(); }
    const std::vector<Correction>& corrections() const { return corrections_; }
    int shift_n() const { return shift_n_; }
    int shift_k() const { return shift_k_; }

    bool operator==(const FibrationData&) const = default;

private:
    MorseData base_;
    ChainLocalSystem system_;
    std::vector<Correction> corrections_;
    int shift_n_;
    int shift_k_;
};

/// Total complex with generators x*a (point x, fiber generator a), block =
/// index(x), ∂_0 = (-1)^index(x) ∂_F, ∂_1 = Σ n_γ Φ_γ over trajectories of
/// index difference one, ∂_r = the corrections. Throws InvariantError at
/// the lowest bidegree where ∂² != 0.
SplitFilteredComplex assemble_fibration(const FibrationData& fd);

struct E2Table {
    std::map<Bidegree, std::size_t> dims;
    std::map<int, LocalSystem> coefficient_systems;
    int shift_n = 0;
    int shift_k = 0;

    std::size_t dim(int p, int q) const;
};

/// E_2^{p,q} = H^p(base; H^q(F)) through morse_complex on the cohomology
/// level systems. Throws InvariantError if it differs from page 2 of the
/// assembled tower.
E2Table e2_table(const FibrationData& fd);

struct LerayComparison {
    bool agree = false;
    int first_page = 2;
    int last_page = 2;
    std::map<int, std::map<Bidegree, std::size_t>> cellular;
    std::map<int, std::map<Bidegree, std::size_t>> fibration;
    std::vector<std::string> differences;
};

/// Compares pages E_2 .. E_inf of the skeleton-filtered cellular model of
/// the total space (levels required) with the assembled fibration tower.
/// Throws PreconditionError("total cohomology disagrees") when the two
/// models do not even have the same cohomology.
LerayComparison leray_serre_compare(const CellularData& total, const FibrationData& fd);

struct ComposeCheck {
    bool on_cohomology = false;
    bool on_chains = false;
    SparseMatrix chain_discrepancy = SparseMatrix(FieldSpec::rationals(), 0, 0);
};

/// For trajectories u: x->y, v: y->z and γ: x->z whose words satisfy
/// γ ≃ u·v through a declared relation (or literally), compares Φ_γ with
/// Φ_v ∘ Φ_u on the fiber cohomology.
ComposeCheck transport_compose_check(const MorseData& md, const ChainLocalSystem& system, std::size_t u,
                                     std::size_t v, std::size_t gamma);

/// Product fibration from a base complex (generators become critical
/// points, an integer coefficient c becomes |c| trajectories) and a fiber.
FibrationData product_fibration(const CochainComplex& base, const CochainComplex& fiber);

struct ActionWindow {
    long long lo = 0;
    long long hi = 0;
};

/// Throws InvariantError unless ∂ strictly lowers the action.
void check_action(const SplitFilteredComplex& c, const std::vector<long long>& action);
/// Generators with lo <= action < hi, as the quotient C^{<hi} / C^{<lo}.
SplitFilteredComplex window_complex(const SplitFilteredComplex& c, const std::vector<long long>& action,
                                    ActionWindow window);
/// The truncation map C^{[a,b)} -> C^{[a',b')} for a <= a', b <= b'.
ChainMap truncation_map(const SplitFilteredComplex& c, const std::vector<long long>& action, ActionWindow from,
                        ActionWindow to);

} // namespace fibss
