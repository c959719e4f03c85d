#pragma once

// Generators and small fixtures shared by the unit tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hamca/automaton.hpp"
#include "hamca/exactmath.hpp"

namespace test
{

using namespace hamca;

inline IntMatrix imat(std::vector<std::vector<long>> rows)
{
    std::vector<std::vector<BigInt>> r;
    for (const auto& row : rows)
    {
        r.emplace_back();
        for (long v : row)
            r.back().emplace_back(v);
    }
    return IntMatrix(r);
}

inline std::vector<BigInt> ivec(std::vector<long> v)
{
    return {v.begin(), v.end()};
}

inline GaussianMatrix pauli_x()
{
    return GaussianMatrix(std::vector<std::vector<GaussianInteger>>{{GaussianInteger(0), GaussianInteger(1)},
                                                                    {GaussianInteger(1), GaussianInteger(0)}});
}

inline long uniform(std::mt19937_64& rng, long lo, long hi)
{
    return std::uniform_int_distribution<long>(lo, hi)(rng);
}

inline BigInt random_digits(std::mt19937_64& rng, std::size_t digits)
{
    std::string s = uniform(rng, 0, 1) ? "-" : "";
    s += static_cast<char>('1' + uniform(rng, 0, 8));
    for (std::size_t k = 1; k < digits; ++k)
        s += static_cast<char>('0' + uniform(rng, 0, 9));
    return BigInt(s);
}

inline HamiltonianParts random_parts(std::mt19937_64& rng, std::size_t n, long bound)
{
    IntMatrix S(n, n);
    IntMatrix A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
        {
            S(i, j) = S(j, i) = uniform(rng, -bound, bound);
            if (i != j)
            {
                A(i, j) = uniform(rng, -bound, bound);
                A(j, i) = -A(i, j);
            }
        }
    return {S, A};
}

inline AutomatonSpec random_spec(std::mt19937_64& rng, std::size_t n, long bound, std::int64_t c)
{
    auto parts = random_parts(rng, n, bound);
    return make_spec(parts.S, parts.A, c);
}

inline Slice random_slice(std::mt19937_64& rng, std::int64_t index, std::size_t n, long bound)
{
    Slice s;
    s.n = index;
    for (std::size_t a = 0; a < n; ++a)
    {
        s.x.emplace_back(uniform(rng, -bound, bound));
        s.p.emplace_back(uniform(rng, -bound, bound));
    }
    s.tau = uniform(rng, -bound, bound);
    s.two_pi = uniform(rng, -bound, bound);
    return s;
}

inline StatePair random_pair(std::mt19937_64& rng, std::size_t n, long bound)
{
    return {random_slice(rng, 0, n, bound), random_slice(rng, 1, n, bound)};
}

/// Seeds of the period-4 orbit psi = 1, -i, -1, i of H = [1], c = 2.
inline AutomatonSpec period4_spec() { return make_spec(imat({{1}}), imat({{0}}), 2); }

inline StatePair period4_seed()
{
    return {Slice{0, ivec({1}), ivec({0}), BigInt(0), BigInt(0)}, Slice{1, ivec({0}), ivec({-1}), BigInt(1), BigInt(0)}};
}

} // namespace test
