#pragma once

// Exact Gaussian-integer scalars and dense matrices.

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hamca/error.hpp"
#include "hamca/integer.hpp"

namespace hamca
{

/// Complex number with exact integer components.
template <ExactInteger Int>
struct basic_gaussian
{
    Int re{0};
    Int im{0};

    basic_gaussian() = default;
    basic_gaussian(Int r, Int i = Int(0)) : re(std::move(r)), im(std::move(i)) {} // NOLINT(google-explicit-constructor)
    basic_gaussian(int r) : re(Int(std::int64_t{r})), im(0) {}                   // NOLINT(google-explicit-constructor)

    static basic_gaussian i() { return {Int(0), Int(1)}; }

    bool is_zero() const { return re == Int(0) && im == Int(0); }

    friend basic_gaussian operator+(const basic_gaussian& a, const basic_gaussian& b)
    {
        return {Int(a.re + b.re), Int(a.im + b.im)};
    }

    friend basic_gaussian operator-(const basic_gaussian& a, const basic_gaussian& b)
    {
        return {Int(a.re - b.re), Int(a.im - b.im)};
    }

    friend basic_gaussian operator*(const basic_gaussian& a, const basic_gaussian& b)
    {
        return {Int(a.re * b.re - a.im * b.im), Int(a.re * b.im + a.im * b.re)};
    }

    basic_gaussian operator-() const { return {Int(Int(0) - re), Int(Int(0) - im)}; }

    basic_gaussian& operator+=(const basic_gaussian& o)
    {
        re = re + o.re;
        im = im + o.im;
        return *this;
    }

    basic_gaussian& operator-=(const basic_gaussian& o)
    {
        re = re - o.re;
        im = im - o.im;
        return *this;
    }

    friend bool operator==(const basic_gaussian& a, const basic_gaussian& b) { return a.re == b.re && a.im == b.im; }

    friend std::ostream& operator<<(std::ostream& os, const basic_gaussian& z)
    {
        os << z.re;
        if (z.im < Int(0))
            os << z.im << 'i';
        else
            os << '+' << z.im << 'i';
        return os;
    }
};

template <ExactInteger Int>
basic_gaussian<Int> conj(const basic_gaussian<Int>& z)
{
    return {z.re, Int(Int(0) - z.im)};
}

/// |z|^2 as an exact integer.
template <ExactInteger Int>
Int norm(const basic_gaussian<Int>& z)
{
    return Int(z.re * z.re + z.im * z.im);
}

/// Dense row-major matrix over an exact ring (plain integers or Gaussian integers).
template <class T>
class dense_matrix
{
public:
    dense_matrix() = default;

    dense_matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    /// Builds from nested rows; all rows must have the same length.
    explicit dense_matrix(const std::vector<std::vector<T>>& rows)
        : rows_(rows.size()), cols_(rows.empty() ? 0 : rows.front().size())
    {
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows)
        {
            if (r.size() != cols_)
                throw dimension_error("ragged matrix rows");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static dense_matrix identity(std::size_t n)
    {
        dense_matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    bool is_zero() const
    {
        for (const auto& v : data_)
            if (!(v == T(0)))
                return false;
        return true;
    }

    friend bool operator==(const dense_matrix&, const dense_matrix&) = default;

    friend dense_matrix operator+(const dense_matrix& a, const dense_matrix& b)
    {
        require_same_shape(a, b);
        dense_matrix r(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.data_.size(); ++k)
            r.data_[k] = a.data_[k] + b.data_[k];
        return r;
    }

    friend dense_matrix operator-(const dense_matrix& a, const dense_matrix& b)
    {
        require_same_shape(a, b);
        dense_matrix r(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.data_.size(); ++k)
            r.data_[k] = a.data_[k] - b.data_[k];
        return r;
    }

    friend dense_matrix operator*(const dense_matrix& a, const dense_matrix& b)
    {
        if (a.cols_ != b.rows_)
            throw dimension_error("matrix product of " + shape(a) + " and " + shape(b));
        dense_matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k)
            {
                const T& aik = a(i, k);
                if (aik == T(0))
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    r(i, j) += aik * b(k, j);
            }
        return r;
    }

    friend std::string shape(const dense_matrix& m)
    {
        return std::to_string(m.rows_) + "x" + std::to_string(m.cols_);
    }

private:
    static void require_same_shape(const dense_matrix& a, const dense_matrix& b)
    {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw dimension_error("shape mismatch " + shape(a) + " vs " + shape(b));
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

template <ExactInteger Int>
using basic_int_matrix = dense_matrix<Int>;

template <ExactInteger Int>
using basic_gaussian_matrix = dense_matrix<basic_gaussian<Int>>;

/// Real (symmetric) and imaginary (antisymmetric) integer parts of H = S + iA.
template <ExactInteger Int>
struct basic_hamiltonian_parts
{
    basic_int_matrix<Int> S;
    basic_int_matrix<Int> A;
};

/// Checks the shape and (anti)symmetry of S and A; throws on the first violation.
template <ExactInteger Int>
void validate_parts(const basic_hamiltonian_parts<Int>& parts)
{
    const auto& S = parts.S;
    const auto& A = parts.A;
    if (!S.is_square())
        throw dimension_error("S must be square, got " + shape(S));
    if (A.rows() != S.rows() || A.cols() != S.cols())
        throw dimension_error("A has shape " + shape(A) + ", S has shape " + shape(S));
    for (std::size_t i = 0; i < S.rows(); ++i)
        for (std::size_t j = i; j < S.cols(); ++j)
        {
            if (!(S(i, j) == S(j, i)))
                throw symmetry_error("S is not symmetric", i, j);
            if (!(A(i, j) == Int(Int(0) - A(j, i))))
                throw symmetry_error("A is not antisymmetric", i, j);
        }
}

/// H = S + iA; self-adjoint by construction.
template <ExactInteger Int>
basic_gaussian_matrix<Int> build_hamiltonian(const basic_hamiltonian_parts<Int>& parts)
{
    validate_parts(parts);
    const std::size_t n = parts.S.rows();
    basic_gaussian_matrix<Int> H(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            H(i, j) = basic_gaussian<Int>(parts.S(i, j), parts.A(i, j));
    return H;
}

/// Splits a self-adjoint Gaussian matrix back into (S, A).
template <ExactInteger Int>
basic_hamiltonian_parts<Int> split_hamiltonian(const basic_gaussian_matrix<Int>& H)
{
    basic_hamiltonian_parts<Int> parts{basic_int_matrix<Int>(H.rows(), H.cols()),
                                       basic_int_matrix<Int>(H.rows(), H.cols())};
    for (std::size_t i = 0; i < H.rows(); ++i)
        for (std::size_t j = 0; j < H.cols(); ++j)
        {
            parts.S(i, j) = H(i, j).re;
            parts.A(i, j) = H(i, j).im;
        }
    validate_parts(parts);
    return parts;
}

template <ExactInteger Int>
basic_gaussian_matrix<Int> adjoint(const basic_gaussian_matrix<Int>& M)
{
    basic_gaussian_matrix<Int> r(M.cols(), M.rows());
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j)
            r(j, i) = conj(M(i, j));
    return r;
}

template <ExactInteger Int>
bool is_self_adjoint(const basic_gaussian_matrix<Int>& M)
{
    if (!M.is_square())
        return false;
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = i; j < M.cols(); ++j)
            if (!(M(i, j) == conj(M(j, i))))
                return false;
    return true;
}

/// GH - HG.
template <ExactInteger Int>
basic_gaussian_matrix<Int> commutator(const basic_gaussian_matrix<Int>& G, const basic_gaussian_matrix<Int>& H)
{
    if (!G.is_square() || !H.is_square() || G.rows() != H.rows())
        throw dimension_error("commutator needs square matrices of equal size, got " + shape(G) + " and " +
                              shape(H));
    return G * H - H * G;
}

/// True iff GH - HG is exactly zero.
template <ExactInteger Int>
bool commutes(const basic_gaussian_matrix<Int>& G, const basic_gaussian_matrix<Int>& H)
{
    return commutator(G, H).is_zero();
}

template <ExactInteger Int>
std::vector<basic_gaussian<Int>> matvec(const basic_gaussian_matrix<Int>& M, std::span<const basic_gaussian<Int>> v)
{
    if (M.cols() != v.size())
        throw dimension_error("matvec of " + shape(M) + " with vector of length " + std::to_string(v.size()));
    std::vector<basic_gaussian<Int>> r(M.rows());
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j)
            if (!M(i, j).is_zero())
                r[i] += M(i, j) * v[j];
    return r;
}

template <ExactInteger Int>
std::vector<basic_gaussian<Int>> matvec(const basic_gaussian_matrix<Int>& M, const std::vector<basic_gaussian<Int>>& v)
{
    return matvec(M, std::span<const basic_gaussian<Int>>(v));
}

/// Sum over a of conj(u_a) v_a.
template <ExactInteger Int>
basic_gaussian<Int> inner(std::span<const basic_gaussian<Int>> u, std::span<const basic_gaussian<Int>> v)
{
    if (u.size() != v.size())
        throw dimension_error("inner product of vectors of length " + std::to_string(u.size()) + " and " +
                              std::to_string(v.size()));
    basic_gaussian<Int> acc;
    for (std::size_t k = 0; k < u.size(); ++k)
        acc += conj(u[k]) * v[k];
    return acc;
}

/// Real part of inner(u, v), at half the multiplications.
template <ExactInteger Int>
Int inner_re(std::span<const basic_gaussian<Int>> u, std::span<const basic_gaussian<Int>> v)
{
    if (u.size() != v.size())
        throw dimension_error("inner product of vectors of length " + std::to_string(u.size()) + " and " +
                              std::to_string(v.size()));
    Int acc(0);
    for (std::size_t k = 0; k < u.size(); ++k)
    {
        acc += u[k].re * v[k].re;
        acc += u[k].im * v[k].im;
    }
    return acc;
}

using GaussianInteger = basic_gaussian<BigInt>;
using GaussianMatrix = basic_gaussian_matrix<BigInt>;
using IntMatrix = basic_int_matrix<BigInt>;
using HamiltonianParts = basic_hamiltonian_parts<BigInt>;

} // namespace hamca
