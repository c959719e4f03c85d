#pragma once

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "hamca/error.hpp"

namespace hamca
{

/// Arbitrary-precision integer used on the default path.
using BigInt = mpz_class;

/// 64-bit integer whose arithmetic throws overflow_error instead of wrapping.
///
/// Useful as a fast path for short runs with small amplitudes; the first
/// overflow aborts the computation loudly.
class CheckedInt64
{
public:
    constexpr CheckedInt64() noexcept = default;
    constexpr CheckedInt64(std::int64_t v) noexcept : value_(v) {} // NOLINT(google-explicit-constructor)

    constexpr std::int64_t value() const noexcept { return value_; }

    friend CheckedInt64 operator+(CheckedInt64 a, CheckedInt64 b)
    {
        std::int64_t r;
        if (__builtin_add_overflow(a.value_, b.value_, &r))
            throw overflow_error("CheckedInt64 addition overflow");
        return r;
    }

    friend CheckedInt64 operator-(CheckedInt64 a, CheckedInt64 b)
    {
        std::int64_t r;
        if (__builtin_sub_overflow(a.value_, b.value_, &r))
            throw overflow_error("CheckedInt64 subtraction overflow");
        return r;
    }

    friend CheckedInt64 operator*(CheckedInt64 a, CheckedInt64 b)
    {
        std::int64_t r;
        if (__builtin_mul_overflow(a.value_, b.value_, &r))
            throw overflow_error("CheckedInt64 multiplication overflow");
        return r;
    }

    friend CheckedInt64 operator/(CheckedInt64 a, CheckedInt64 b)
    {
        if (b.value_ == 0)
            throw overflow_error("CheckedInt64 division by zero");
        if (a.value_ == std::numeric_limits<std::int64_t>::min() && b.value_ == -1)
            throw overflow_error("CheckedInt64 division overflow");
        return a.value_ / b.value_;
    }

    CheckedInt64 operator-() const { return CheckedInt64(0) - *this; }

    CheckedInt64& operator+=(CheckedInt64 o) { return *this = *this + o; }
    CheckedInt64& operator-=(CheckedInt64 o) { return *this = *this - o; }
    CheckedInt64& operator*=(CheckedInt64 o) { return *this = *this * o; }

    friend constexpr bool operator==(CheckedInt64, CheckedInt64) noexcept = default;
    friend constexpr auto operator<=>(CheckedInt64, CheckedInt64) noexcept = default;

    friend std::ostream& operator<<(std::ostream& os, CheckedInt64 v) { return os << v.value_; }

private:
    std::int64_t value_ = 0;
};

/// Integer types the exact engine can run on.
template <class T>
concept ExactInteger = std::copyable<T> && requires(const T& a, const T& b) {
    { a + b } -> std::convertible_to<T>;
    { a - b } -> std::convertible_to<T>;
    { a * b } -> std::convertible_to<T>;
    { a == b } -> std::convertible_to<bool>;
    T(std::int64_t{0});
};

// Digit counts. For BigInt the count may exceed the true value by one.

inline std::size_t decimal_digits(const BigInt& v)
{
    return v == 0 ? 1 : mpz_sizeinbase(v.get_mpz_t(), 10);
}

inline std::size_t decimal_digits(CheckedInt64 v)
{
    std::uint64_t m = v.value() < 0 ? 0 - static_cast<std::uint64_t>(v.value()) : static_cast<std::uint64_t>(v.value());
    std::size_t d = 1;
    while (m >= 10)
    {
        m /= 10;
        ++d;
    }
    return d;
}

inline std::string to_string(const BigInt& v) { return v.get_str(); }
inline std::string to_string(CheckedInt64 v) { return std::to_string(v.value()); }

/// Exact conversion; integers beyond 2^53 in magnitude are rejected.
inline double to_double_exact(const BigInt& v)
{
    if (abs(v) > (BigInt(1) << 53))
        throw precision_error("integer " + v.get_str() + " exceeds 2^53 and cannot be converted to double exactly");
    return v.get_d();
}

inline double to_double_exact(CheckedInt64 v)
{
    constexpr std::int64_t limit = std::int64_t{1} << 53;
    if (v.value() > limit || v.value() < -limit)
        throw precision_error("integer " + std::to_string(v.value()) + " exceeds 2^53");
    return static_cast<double>(v.value());
}

/// Parses an optionally signed decimal integer.
inline BigInt parse_bigint(std::string_view text)
{
    std::string s(text);
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size())
        throw range_error("empty integer literal");
    for (std::size_t k = i; k < s.size(); ++k)
        if (s[k] < '0' || s[k] > '9')
            throw range_error("invalid integer literal '" + s + "'");
    if (s[0] == '+')
        s.erase(0, 1);
    return BigInt(s, 10);
}

/// Rounds a double half away from zero to the nearest integer.
inline BigInt round_to_bigint(double v)
{
    if (!(v == v) || v > std::numeric_limits<double>::max() || v < -std::numeric_limits<double>::max())
        throw range_error("cannot round a non-finite value");
    return BigInt(std::round(v));
}

/// Converts an arbitrary-precision value into the engine's integer type.
template <class Int>
Int narrow(const BigInt& v)
{
    if constexpr (std::same_as<Int, BigInt>)
        return v;
    else
    {
        if (!v.fits_slong_p())
            throw overflow_error("value " + v.get_str() + " does not fit a 64-bit integer");
        return Int(static_cast<std::int64_t>(v.get_si()));
    }
}

} // namespace hamca
