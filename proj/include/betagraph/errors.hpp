#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace betagraph {

// Argument outside the mathematical domain of an operation (x <= 0 for psi,
// non-finite input, non-positive parameter vector, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Input data violates a structural invariant. Carries the offending matrix
// entry when one can be named; row/col are 0-based and -1 when not applicable.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what_arg,
                             std::ptrdiff_t row = -1, std::ptrdiff_t col = -1)
        : std::invalid_argument(what_arg), row_(row), col_(col) {}

    std::ptrdiff_t row() const noexcept { return row_; }
    std::ptrdiff_t col() const noexcept { return col_; }

private:
    std::ptrdiff_t row_;
    std::ptrdiff_t col_;
};

// The observed statistic sits on the boundary of the admissible region
// (M <= ln 2, attainable only for degenerate inputs such as an all-1/2
// matrix), so no starting point exists and no ML estimate can be found.
class DegenerateStatisticError : public DomainError {
public:
    using DomainError::DomainError;
};

// An internal root finder failed to converge. Signals an implementation or
// input-corruption problem, not an expected runtime condition.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file. line/column are 1-based; 0 means unknown.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what_arg,
                        std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(what_arg), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace betagraph
