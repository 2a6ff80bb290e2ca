#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fibss/exactfield.hpp"

namespace fibss {

struct Edge {
    std::string id;
    std::string from;
    std::string to;

    bool operator==(const Edge&) const = default;
};

/// One edge traversed forwards or backwards.
struct Step {
    std::size_t edge = 0;
    bool inverse = false;

    bool operator==(const Step&) const = default;
};

/// Edge path with an explicit start so that constant paths make sense.
struct EdgePath {
    std::size_t start = 0;
    std::vector<Step> steps;

    bool operator==(const EdgePath&) const = default;
};

/// Finite graph standing for a 1-skeleton, plus closed words that bound
/// 2-cells. Words are written as space separated edge ids, "e^-1" for an
/// inverse traversal.
class BaseGraph {
public:
    BaseGraph() = default;
    /// Throws InvariantError on unknown endpoints, duplicate ids, or
    /// relation words that are not closed composable loops.
    BaseGraph(std::vector<std::string> vertices, std::vector<Edge> edges, std::vector<std::string> relations = {});

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<EdgePath>& relations() const { return relations_; }
    const std::vector<std::string>& relation_texts() const { return relation_texts_; }

    std::optional<std::size_t> vertex_index(std::string_view id) const;
    std::optional<std::size_t> edge_index(std::string_view id) const;
    std::size_t source(std::size_t edge) const { return sources_[edge]; }
    std::size_t target(std::size_t edge) const { return targets_[edge]; }

    /// Parses a word. An empty word needs `start` to name its vertex. Throws
    /// PreconditionError for unknown edges or non-composable words.
    EdgePath parse_path(std::string_view text, std::optional<std::size_t> start = std::nullopt) const;
    std::string format_path(const EdgePath& path) const;
    /// Throws PreconditionError unless consecutive steps meet.
    std::size_t end_of(const EdgePath& path) const;

    EdgePath constant(std::size_t vertex) const { return {vertex, {}}; }
    EdgePath concat(const EdgePath& a, const EdgePath& b) const;
    EdgePath inverse(const EdgePath& a) const;

    bool operator==(const BaseGraph& rhs) const;

private:
    std::vector<std::string> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> sources_, targets_;
    std::vector<EdgePath> relations_;
    std::vector<std::string> relation_texts_;
    std::unordered_map<std::string, std::size_t> vertex_index_, edge_index_;
};

/// Free fiber M of a fixed rank at every vertex with an invertible transport
/// Φ_e: M_from -> M_to per edge. Along a path the transports compose in
/// traversal order: Φ_{α·β} = Φ_β ∘ Φ_α.
class LocalSystem {
public:
    /// Throws InvariantError unless every Φ_e is invertible and every
    /// relation word transports to the identity.
    LocalSystem(BaseGraph base, FieldSpec field, std::size_t rank, std::vector<SparseMatrix> transports);
    /// Same but only checks shapes and invertibility, so that failing data
    /// can be inspected with check_homotopy_invariance.
    static LocalSystem unchecked(BaseGraph base, FieldSpec field, std::size_t rank,
                                 std::vector<SparseMatrix> transports);
    static LocalSystem trivial(BaseGraph base, FieldSpec field, std::size_t rank);

    const BaseGraph& base() const { return base_; }
    const FieldSpec& field() const { return field_; }
    std::size_t rank() const { return rank_; }
    const SparseMatrix& edge_transport(std::size_t edge) const { return transports_[edge]; }
    const SparseMatrix& edge_inverse(std::size_t edge) const { return inverses_[edge]; }
    const std::vector<SparseMatrix>& transports() const { return transports_; }

    bool operator==(const LocalSystem& rhs) const;

private:
    LocalSystem(BaseGraph base, FieldSpec field, std::size_t rank, std::vector<SparseMatrix> transports, bool check);

    BaseGraph base_;
    FieldSpec field_;
    std::size_t rank_;
    std::vector<SparseMatrix> transports_;
    std::vector<SparseMatrix> inverses_;
};

/// Parallel transport along a path; the identity for constant paths.
SparseMatrix transport(const LocalSystem& ls, const EdgePath& path);
SparseMatrix transport(const LocalSystem& ls, std::string_view word);

struct HomotopyCheck {
    bool ok = true;
    std::optional<EdgePath> counterexample;
    std::string word;
};

HomotopyCheck check_homotopy_invariance(const LocalSystem& ls);

/// Transport data on a restricted set of paths: the groupoid generated by
/// `paths` (closed under inversion and catenation, with the constants at
/// the carrier vertices).
class LocalSubsystem {
public:
    /// Throws InvariantError unless every generating path runs between
    /// carrier vertices and every transport is an invertible rank x rank
    /// matrix.
    LocalSubsystem(BaseGraph base, FieldSpec field, std::size_t rank, std::vector<std::size_t> carrier,
                   std::vector<EdgePath> paths, std::vector<SparseMatrix> transports);

    const BaseGraph& base() const { return base_; }
    const FieldSpec& field() const { return field_; }
    std::size_t rank() const { return rank_; }
    const std::vector<std::size_t>& carrier() const { return carrier_; }
    const std::vector<EdgePath>& paths() const { return paths_; }
    const std::vector<SparseMatrix>& transports() const { return transports_; }

    bool in_carrier(std::size_t vertex) const;
    /// Whether every carrier vertex is reached from every other through P.
    bool connected_support() const;

    bool operator==(const LocalSubsystem& rhs) const;

private:
    BaseGraph base_;
    FieldSpec field_;
    std::size_t rank_;
    std::vector<std::size_t> carrier_;
    std::vector<EdgePath> paths_;
    std::vector<SparseMatrix> transports_;
};

enum class Surjectivity { Yes, No, Unknown };

std::string to_string(Surjectivity s);

struct MonodromyReport {
    std::size_t base_point = 0;
    /// Loops at the base point realised inside the subsystem, one per
    /// generating path.
    std::vector<EdgePath> subsystem_loops;
    /// Free generators of π_1 of the graph at the base point, one per edge
    /// outside the chosen spanning tree.
    std::vector<EdgePath> base_generators;
    Surjectivity verdict = Surjectivity::Unknown;
    bool surjective = false;
    /// Images of base_generators under the factorised representation.
    std::vector<SparseMatrix> monodromy;
    std::optional<LocalSystem> extension;
};

struct ExtendOptions {
    /// Conjugates u r u^-1 of the relators with |u| up to this length are
    /// used when deciding whether the subsystem loops generate π_1.
    int max_word_depth = 6;
    /// Base point; defaults to the first carrier vertex.
    std::optional<std::size_t> base_point;
};

/// Throws PreconditionError for disconnected support and InvariantError when
/// the subsystem transports contradict the homotopies of the base.
MonodromyReport extend_subsystem(const LocalSubsystem& sub, const ExtendOptions& options = {});

/// Free generators τ_u e τ_v^-1 of π_1 of the graph at x0 for the BFS
/// spanning tree rooted at x0, one per non-tree edge in edge order.
std::vector<EdgePath> fundamental_generators(const BaseGraph& base, std::size_t x0);
/// Tree path from x0 to every vertex (BFS order, ties by edge order).
std::vector<std::optional<EdgePath>> tree_paths(const BaseGraph& base, std::size_t x0);

} // namespace fibss
