#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace abskkt {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
        : Error(what + ": expected " + std::to_string(expected) + ", got " + std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

/// A pivot (triangular diagonal, LDL^T block, implicit-LU pivot) was zero or below threshold.
class SingularError : public Error {
public:
    SingularError(const std::string& what, std::size_t index)
        : Error(what + " at index " + std::to_string(index)), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// An implicit-LU step found no admissible pivot: the processed rows are dependent.
class RankDeficientError : public Error {
public:
    RankDeficientError(std::size_t step, double pivot)
        : Error("rank deficiency detected at step " + std::to_string(step) +
                " (max |s_j| = " + std::to_string(pivot) + ")"),
          step_(step), pivot_(pivot) {}

    std::size_t step() const noexcept { return step_; }
    double pivot() const noexcept { return pivot_; }

private:
    std::size_t step_;
    double pivot_;
};

/// A dependent row whose right-hand side contradicts the earlier rows.
class IncompatibleError : public Error {
public:
    IncompatibleError(std::size_t row, double residual)
        : Error("incompatible system at row " + std::to_string(row) +
                " (residual component " + std::to_string(residual) + ")"),
          row_(row), residual_(residual) {}

    std::size_t row() const noexcept { return row_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t row_;
    double residual_;
};

/// The caller-chosen ABS parameters z or w are (numerically) orthogonal to s.
class DegenerateParameterError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace abskkt
