#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fibss/chaincore.hpp"
#include "fibss/localsys.hpp"
#include "fibss/morsefib.hpp"
#include "fibss/specseq.hpp"

namespace fibss::io {

struct SplitDoc {
    SplitFilteredComplex complex;
    std::optional<std::vector<long long>> action;
};

/// Morse or cellular data together with the local system it is twisted by.
struct MorseDoc {
    MorseData data;
    LocalSystem system;
};

struct CellularDoc {
    CellularData data;
    LocalSystem system;
};

/// One parsed file. The "kind" key selects the alternative: complex,
/// filtered, split, base_graph, local_system, subsystem, morse, cellular,
/// fibration.
using Document = std::variant<CochainComplex, FilteredComplex, SplitDoc, BaseGraph, LocalSystem, LocalSubsystem,
                              MorseDoc, CellularDoc, FibrationData>;

struct ParseOptions {
    /// Replaces the document's "field".
    std::optional<FieldSpec> field;
    /// Replace the grading shifts of a fibration document.
    std::optional<int> shift_n;
    std::optional<int> shift_k;
    /// Base graph for a subsystem document; replaces an embedded one.
    std::optional<BaseGraph> base;
};

/// Throws ParseError (syntax errors carry line and column, schema errors a
/// JSON path) and InvariantError when the data violates an invariant.
/// read_document throws std::runtime_error when the file cannot be read.
Document parse_document(std::string_view text, const ParseOptions& options = {});
Document read_document(const std::string& path, const ParseOptions& options = {});

/// Canonical text: fixed key order, canonical bases, identity transports
/// omitted, newline terminated.
std::string print_document(const Document& doc);

std::string kind_of(const Document& doc);

} // namespace fibss::io
