#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tenring {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Short machine-readable tag, used by the CLI error JSON.
    virtual const char* kind() const noexcept { return "error"; }
};

/// Shapes, modes or ranks that do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "dimension_mismatch"; }
};

/// A dense tensor would exceed the configured element budget.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(std::size_t requested, std::size_t budget)
        : Error("tensor of " + std::to_string(requested) +
                " elements exceeds element budget " + std::to_string(budget)),
          requested_(requested),
          budget_(budget) {}
    const char* kind() const noexcept override { return "budget_exceeded"; }
    std::size_t requested() const noexcept { return requested_; }
    std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t requested_;
    std::size_t budget_;
};

/// Triangular factor with a diagonal entry below the degeneracy floor.
class DegenerateTriangular : public Error {
public:
    DegenerateTriangular(std::size_t index, double value, double floor)
        : Error("triangular factor degenerate at diagonal " + std::to_string(index) +
                " (|r_ii| = " + std::to_string(value) + " below floor " +
                std::to_string(floor) + ")"),
          index_(index) {}
    const char* kind() const noexcept override { return "degenerate_triangular"; }
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Cheap error estimate requested from a cache that is not at end of sweep.
class StaleCache : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "stale_cache"; }
};

/// Malformed tensor file or report.
class FormatError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "malformed_input"; }
};

}  // namespace tenring
