#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hamca
{

/// Base class of every error raised by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class dimension_error : public error
{
public:
    using error::error;
};

/// A matrix that must be symmetric (or antisymmetric) is not; names the
/// first offending entry.
class symmetry_error : public error
{
public:
    symmetry_error(const std::string& what, std::size_t row, std::size_t col)
        : error(what + " at (" + std::to_string(row) + ", " + std::to_string(col) + ")"),
          row_(row), col_(col)
    {
    }

    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

class range_error : public error
{
public:
    using error::error;
};

/// Raised by the fixed-width integer path instead of wrapping.
class overflow_error : public error
{
public:
    using error::error;
};

/// Raised when converting an integer to double would lose precision.
class precision_error : public error
{
public:
    using error::error;
};

/// Evolution stopped because a slice entry outgrew the digit budget.
class budget_exceeded : public error
{
public:
    budget_exceeded(std::int64_t step, std::size_t digits, std::size_t budget)
        : error("slice " + std::to_string(step) + " has an entry with " + std::to_string(digits) +
                " decimal digits, budget is " + std::to_string(budget)),
          step_(step), digits_(digits)
    {
    }

    std::int64_t step() const noexcept { return step_; }
    std::size_t digits() const noexcept { return digits_; }

private:
    std::int64_t step_;
    std::size_t digits_;
};

/// A documented precondition of the continuum or QM bridge does not hold.
class precondition_error : public error
{
public:
    using error::error;
};

/// Every mode of a Hamiltonian lies outside the band |eps| <= 1.
class band_error : public error
{
public:
    using error::error;
};

} // namespace hamca
