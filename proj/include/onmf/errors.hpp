#pragma once

#include <stdexcept>
#include <string>

namespace onmf {

/// Bad user input: malformed data, invalid parameters, impossible configuration.
/// The CLI maps these to exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Negative entry in data that must be nonnegative. Coordinates are 1-based.
class NonnegativityError : public InputError {
public:
    NonnegativityError(std::size_t row, std::size_t col, double value)
        : InputError("negative entry " + std::to_string(value) + " at row " + std::to_string(row) +
                     ", column " + std::to_string(col)),
          row_(row), col_(col) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

/// Fewer distinct data rows than requested clusters.
class DuplicateRowsError : public InputError {
public:
    using InputError::InputError;
};

/// Numerical degeneracy the solver cannot absorb. The CLI maps these to exit code 3.
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Centroid row for which the coefficient subproblem has no well-defined
/// minimizer (e.g. zero row with no l2 shrinkage under the l2 discrepancy).
class DegenerateCentroidError : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

class NoValidCentroidError : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

/// Zero-norm vector passed where an angle is needed.
class DegenerateInputError : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

}  // namespace onmf
