#pragma once

#include <stdexcept>
#include <string>

namespace fibss {

// Root of the library's exception hierarchy. The CLI maps each leaf to an
// exit code: ParseError -> 2, InvariantError -> 3, PreconditionError -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input document (syntax, schema, or unresolved identifiers).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(what), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// A structural invariant failed: d^2 != 0, non-commuting square, singular
// transport, a subspace that is not contained where it must be, ...
class InvariantError : public Error {
public:
    using Error::Error;
};

// Mismatched shapes or fields passed to a linear-algebra routine.
class DimensionError : public InvariantError {
public:
    using InvariantError::InvariantError;
};

// Input is well formed but the operation's precondition does not hold
// (disconnected support, models of different spaces, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace fibss
