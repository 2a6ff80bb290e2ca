#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fibss/exactfield.hpp"

namespace fibss {

struct Generator {
    std::string id;
    int degree = 0;

    bool operator==(const Generator&) const = default;
};

/// Ordered list of uniquely named generators. The order inside each degree
/// fixes the coordinates of C^k.
class GradedBasis {
public:
    GradedBasis() = default;
    explicit GradedBasis(std::vector<Generator> generators);

    const std::vector<Generator>& generators() const { return generators_; }
    std::size_t size() const { return generators_.size(); }
    const Generator& operator[](std::size_t i) const { return generators_[i]; }

    std::optional<std::size_t> index_of(const std::string& id) const;
    /// Global indices of the generators in degree k, in basis order.
    const std::vector<std::size_t>& in_degree(int k) const;
    std::size_t dim(int k) const { return in_degree(k).size(); }
    /// Position of a generator inside its own degree.
    std::size_t local_index(std::size_t global) const { return local_[global]; }
    /// Distinct degrees carrying generators, ascending.
    std::vector<int> degrees() const;

    bool operator==(const GradedBasis& rhs) const { return generators_ == rhs.generators_; }

private:
    std::vector<Generator> generators_;
    std::unordered_map<std::string, std::size_t> index_;
    std::map<int, std::vector<std::size_t>> by_degree_;
    std::vector<std::size_t> local_;
};

/// Finite cochain complex with a degree +1 differential. d(k) is the
/// dim C^{k+1} x dim C^k matrix of the differential leaving degree k.
class CochainComplex {
public:
    /// Throws DimensionError on misshapen blocks and InvariantError when
    /// d(k+1) d(k) != 0 for some k.
    CochainComplex(FieldSpec field, GradedBasis basis, std::map<int, SparseMatrix> differential,
                   int display_shift = 0);

    /// Builds the blocks from an N x N matrix on the global basis (column =
    /// source generator). Entries must raise the degree by exactly one.
    static CochainComplex from_global(FieldSpec field, GradedBasis basis, const SparseMatrix& global,
                                      int display_shift = 0);

    const FieldSpec& field() const { return field_; }
    const GradedBasis& basis() const { return basis_; }
    std::size_t dim(int k) const { return basis_.dim(k); }
    std::vector<int> degrees() const { return basis_.degrees(); }
    SparseMatrix d(int k) const;
    SparseMatrix global_differential() const;
    int display_shift() const { return display_shift_; }

    bool operator==(const CochainComplex& rhs) const;

private:
    FieldSpec field_;
    GradedBasis basis_;
    std::map<int, SparseMatrix> differential_;
    int display_shift_;
};

/// Cohomology with explicit representatives. representatives.at(k) holds
/// cocycles of C^k (local coordinates) whose classes form a basis of H^k;
/// boundaries.at(k) is a basis of im d(k-1).
struct CohomologyResult {
    FieldSpec field = FieldSpec::rationals();
    std::map<int, std::size_t> dims;
    std::map<int, SparseMatrix> representatives;
    std::map<int, SparseMatrix> boundaries;

    std::size_t dim(int k) const;
    long long euler_characteristic() const;
};

CohomologyResult cohomology(const CochainComplex& c);

/// Coordinates of the classes of the given cocycles (columns, local
/// coordinates of C^k) in the basis given by result.representatives.at(k).
/// Throws InvariantError if some column is not a cocycle.
SparseMatrix class_coordinates(const CohomologyResult& result, int k, const SparseMatrix& cocycles);

long long euler_characteristic(const CochainComplex& c);

/// Product complex: generators "x*y" in degree |x|+|y|, ordered by the first
/// factor then the second, with d(x*y) = dx*y + (-1)^|x| x*dy.
CochainComplex tensor_product(const CochainComplex& a, const CochainComplex& b);

/// Degreewise linear map commuting with the differentials. block(k) is
/// target.dim(k) x source.dim(k).
class ChainMap {
public:
    /// Throws InvariantError when a square fails to commute.
    ChainMap(CochainComplex source, CochainComplex target, std::map<int, SparseMatrix> blocks);

    static ChainMap identity(const CochainComplex& c);
    static ChainMap zero(const CochainComplex& source, const CochainComplex& target);

    const CochainComplex& source() const { return source_; }
    const CochainComplex& target() const { return target_; }
    SparseMatrix block(int k) const;

private:
    CochainComplex source_;
    CochainComplex target_;
    std::map<int, SparseMatrix> blocks_;
};

/// Matrix of H^k(f) in the representative bases of source and target.
std::map<int, SparseMatrix> induced_map_on_cohomology(const ChainMap& f);

} // namespace fibss
