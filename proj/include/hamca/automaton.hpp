#pragma once

// Integer Hamiltonian cellular automaton: the three-slice update rule, its
// exact inverse, the integer action and its symmetric variation, and the
// exact conservation residuals.
//
// Energies and the "pi" momentum are kept doubled (2H, 2pi) so that every
// quantity stays an integer even when diag(S) has odd entries.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hamca/error.hpp"
#include "hamca/exactmath.hpp"
#include "hamca/integer.hpp"

namespace hamca
{

/// The dynamical law: H = S + iA on `dim` degrees of freedom and the
/// constant lapse c (the tau increment over a double step).
template <ExactInteger Int>
struct basic_automaton_spec
{
    std::size_t dim = 0;
    basic_hamiltonian_parts<Int> parts;
    std::int64_t lapse_c = 2;

    void validate() const
    {
        if (dim == 0)
            throw dimension_error("automaton needs at least one degree of freedom");
        validate_parts(parts);
        if (parts.S.rows() != dim)
            throw dimension_error("S is " + shape(parts.S) + " but dim is " + std::to_string(dim));
    }

    basic_gaussian_matrix<Int> hamiltonian() const { return build_hamiltonian(parts); }

    Int lapse() const { return Int(lapse_c); }
};

template <ExactInteger Int>
basic_automaton_spec<Int> make_spec(basic_int_matrix<Int> S, basic_int_matrix<Int> A, std::int64_t lapse_c)
{
    basic_automaton_spec<Int> spec{S.rows(), {std::move(S), std::move(A)}, lapse_c};
    spec.validate();
    return spec;
}

/// One CA state: coordinates x, momenta p, dynamical time tau and 2*pi.
template <ExactInteger Int>
struct basic_slice
{
    std::int64_t n = 0;
    std::vector<Int> x;
    std::vector<Int> p;
    Int tau{0};
    Int two_pi{0};

    std::size_t dim() const noexcept { return x.size(); }

    /// psi = x + ip.
    std::vector<basic_gaussian<Int>> psi() const
    {
        std::vector<basic_gaussian<Int>> r;
        r.reserve(x.size());
        for (std::size_t a = 0; a < x.size(); ++a)
            r.emplace_back(x[a], p[a]);
        return r;
    }

    /// Largest decimal digit count over all entries.
    std::size_t max_digits() const
    {
        std::size_t d = std::max(decimal_digits(tau), decimal_digits(two_pi));
        for (const auto& v : x)
            d = std::max(d, decimal_digits(v));
        for (const auto& v : p)
            d = std::max(d, decimal_digits(v));
        return d;
    }

    friend bool operator==(const basic_slice&, const basic_slice&) = default;
};

/// Two consecutive slices (n-1, n): the data the recursion needs.
template <ExactInteger Int>
struct basic_state_pair
{
    basic_slice<Int> prev;
    basic_slice<Int> curr;

    friend bool operator==(const basic_state_pair&, const basic_state_pair&) = default;
};

template <ExactInteger Int>
struct basic_trajectory
{
    basic_automaton_spec<Int> spec;
    std::vector<basic_slice<Int>> slices;

    std::size_t size() const noexcept { return slices.size(); }

    basic_state_pair<Int> pair_at(std::size_t i) const { return {slices.at(i), slices.at(i + 1)}; }
};

namespace detail
{

/// H psi split as re = Sx - Ap, im = Sp + Ax.
template <ExactInteger Int>
struct h_applied
{
    std::vector<Int> re;
    std::vector<Int> im;
};

template <ExactInteger Int>
void require_dim(const basic_automaton_spec<Int>& spec, const basic_slice<Int>& s)
{
    if (s.x.size() != spec.dim || s.p.size() != spec.dim)
        throw dimension_error("slice " + std::to_string(s.n) + " has " + std::to_string(s.x.size()) + "/" +
                              std::to_string(s.p.size()) + " components, automaton has " + std::to_string(spec.dim));
}

template <ExactInteger Int>
h_applied<Int> apply_h(const basic_automaton_spec<Int>& spec, const basic_slice<Int>& s)
{
    const auto& S = spec.parts.S;
    const auto& A = spec.parts.A;
    const Int zero(0);
    h_applied<Int> r{std::vector<Int>(spec.dim, zero), std::vector<Int>(spec.dim, zero)};
    for (std::size_t a = 0; a < spec.dim; ++a)
        for (std::size_t b = 0; b < spec.dim; ++b)
        {
            if (!(S(a, b) == zero))
            {
                r.re[a] += S(a, b) * s.x[b];
                r.im[a] += S(a, b) * s.p[b];
            }
            if (!(A(a, b) == zero))
            {
                r.re[a] -= A(a, b) * s.p[b];
                r.im[a] += A(a, b) * s.x[b];
            }
        }
    return r;
}

/// 2H = x.(Sx - Ap) + p.(Sp + Ax) = S(xx + pp) + 2 A p x.
template <ExactInteger Int>
Int doubled_energy(const basic_slice<Int>& s, const h_applied<Int>& h)
{
    Int acc(0);
    for (std::size_t a = 0; a < s.x.size(); ++a)
    {
        acc += s.x[a] * h.re[a];
        acc += s.p[a] * h.im[a];
    }
    return acc;
}

template <ExactInteger Int>
void require_pair(const basic_automaton_spec<Int>& spec, const basic_state_pair<Int>& pair)
{
    require_dim(spec, pair.prev);
    require_dim(spec, pair.curr);
    if (pair.curr.n != pair.prev.n + 1)
        throw range_error("state pair indices " + std::to_string(pair.prev.n) + ", " + std::to_string(pair.curr.n) +
                          " are not consecutive");
}

} // namespace detail

/// 2H_n for one slice; always an exact integer.
template <ExactInteger Int>
Int hamiltonian_doubled(const basic_automaton_spec<Int>& spec, const basic_slice<Int>& s)
{
    detail::require_dim(spec, s);
    return detail::doubled_energy(s, detail::apply_h(spec, s));
}

/// Moves a state pair forward or backward one slice at a time.
///
/// Caches H psi and 2H for both held slices, so each step costs one
/// matrix-vector pass and one energy evaluation.
template <ExactInteger Int>
class basic_stepper
{
public:
    basic_stepper(basic_automaton_spec<Int> spec, basic_state_pair<Int> init)
        : spec_(std::move(spec)), pair_(std::move(init))
    {
        spec_.validate();
        detail::require_pair(spec_, pair_);
        h_prev_ = detail::apply_h(spec_, pair_.prev);
        h_curr_ = detail::apply_h(spec_, pair_.curr);
        two_h_prev_ = detail::doubled_energy(pair_.prev, h_prev_);
        two_h_curr_ = detail::doubled_energy(pair_.curr, h_curr_);
    }

    const basic_state_pair<Int>& state() const noexcept { return pair_; }
    const basic_automaton_spec<Int>& spec() const noexcept { return spec_; }
    const Int& two_h_prev() const noexcept { return two_h_prev_; }
    const Int& two_h_curr() const noexcept { return two_h_curr_; }

    /// (n-1, n) -> (n, n+1).
    void advance()
    {
        const Int c = spec_.lapse();
        const auto& prev = pair_.prev;
        const auto& curr = pair_.curr;
        basic_slice<Int> next;
        next.n = curr.n + 1;
        next.x.resize(spec_.dim);
        next.p.resize(spec_.dim);
        for (std::size_t a = 0; a < spec_.dim; ++a)
        {
            next.x[a] = prev.x[a] + c * h_curr_.im[a];
            next.p[a] = prev.p[a] - c * h_curr_.re[a];
        }
        next.tau = prev.tau + c;
        auto h_next = detail::apply_h(spec_, next);
        Int two_h_next = detail::doubled_energy(next, h_next);
        next.two_pi = prev.two_pi + two_h_next - two_h_prev_;

        pair_.prev = std::move(pair_.curr);
        pair_.curr = std::move(next);
        h_prev_ = std::move(h_curr_);
        h_curr_ = std::move(h_next);
        two_h_prev_ = std::move(two_h_curr_);
        two_h_curr_ = std::move(two_h_next);
    }

    /// (n-1, n) -> (n-2, n-1); exact inverse of advance().
    void retreat()
    {
        const Int c = spec_.lapse();
        const auto& prev = pair_.prev;
        const auto& curr = pair_.curr;
        basic_slice<Int> earlier;
        earlier.n = prev.n - 1;
        earlier.x.resize(spec_.dim);
        earlier.p.resize(spec_.dim);
        for (std::size_t a = 0; a < spec_.dim; ++a)
        {
            earlier.x[a] = curr.x[a] - c * h_prev_.im[a];
            earlier.p[a] = curr.p[a] + c * h_prev_.re[a];
        }
        earlier.tau = curr.tau - c;
        auto h_earlier = detail::apply_h(spec_, earlier);
        Int two_h_earlier = detail::doubled_energy(earlier, h_earlier);
        earlier.two_pi = curr.two_pi - two_h_curr_ + two_h_earlier;

        pair_.curr = std::move(pair_.prev);
        pair_.prev = std::move(earlier);
        h_curr_ = std::move(h_prev_);
        h_prev_ = std::move(h_earlier);
        two_h_curr_ = std::move(two_h_prev_);
        two_h_prev_ = std::move(two_h_earlier);
    }

private:
    basic_automaton_spec<Int> spec_;
    basic_state_pair<Int> pair_;
    detail::h_applied<Int> h_prev_;
    detail::h_applied<Int> h_curr_;
    Int two_h_prev_{0};
    Int two_h_curr_{0};
};

template <ExactInteger Int>
basic_state_pair<Int> step_forward(const basic_automaton_spec<Int>& spec, const basic_state_pair<Int>& pair)
{
    basic_stepper<Int> st(spec, pair);
    st.advance();
    return st.state();
}

/// Given (slice n, slice n+1) returns (slice n-1, slice n).
template <ExactInteger Int>
basic_state_pair<Int> step_backward(const basic_automaton_spec<Int>& spec, const basic_state_pair<Int>& pair)
{
    basic_stepper<Int> st(spec, pair);
    st.retreat();
    return st.state();
}

struct evolve_options
{
    /// Abort once any slice entry needs more decimal digits than this.
    std::size_t digit_budget = 1'000'000;
};

namespace detail
{

template <ExactInteger Int>
void check_budget(const basic_slice<Int>& s, const evolve_options& opts)
{
    const std::size_t d = s.max_digits();
    if (d > opts.digit_budget)
        throw budget_exceeded(s.n, d, opts.digit_budget);
}

} // namespace detail

/// Slices n0-before .. n0+1+after around the seed pair (n0, n0+1).
template <ExactInteger Int>
basic_trajectory<Int> evolve_around(const basic_automaton_spec<Int>& spec, const basic_state_pair<Int>& init,
                                    std::size_t before, std::size_t after, const evolve_options& opts = {})
{
    basic_trajectory<Int> traj{spec, {}};
    traj.slices.reserve(before + after + 2);

    if (before > 0)
    {
        basic_stepper<Int> back(spec, init);
        std::vector<basic_slice<Int>> earlier;
        earlier.reserve(before);
        for (std::size_t k = 0; k < before; ++k)
        {
            back.retreat();
            detail::check_budget(back.state().prev, opts);
            earlier.push_back(back.state().prev);
        }
        traj.slices.assign(earlier.rbegin(), earlier.rend());
    }

    basic_stepper<Int> fwd(spec, init);
    traj.slices.push_back(init.prev);
    traj.slices.push_back(init.curr);
    for (std::size_t k = 0; k < after; ++k)
    {
        fwd.advance();
        detail::check_budget(fwd.state().curr, opts);
        traj.slices.push_back(fwd.state().curr);
    }
    return traj;
}

/// The seed pair followed by `steps` new slices.
template <ExactInteger Int>
basic_trajectory<Int> evolve(const basic_automaton_spec<Int>& spec, const basic_state_pair<Int>& init,
                             std::size_t steps, const evolve_options& opts = {})
{
    return evolve_around(spec, init, 0, steps, opts);
}

/// True iff (a, b, c) = slices (n-1, n, n+1) obey the update rule exactly.
template <ExactInteger Int>
bool satisfies_equations_of_motion(const basic_automaton_spec<Int>& spec, const basic_slice<Int>& a,
                                   const basic_slice<Int>& b, const basic_slice<Int>& c)
{
    const auto next = step_forward(spec, basic_state_pair<Int>{a, b}).curr;
    return next.x == c.x && next.p == c.p && next.tau == c.tau && next.two_pi == c.two_pi;
}

namespace detail
{

/// Contribution of step (a -> b) to 2S, given 2H at both slices.
template <ExactInteger Int>
Int action_term(const basic_automaton_spec<Int>& spec, const basic_slice<Int>& a, const basic_slice<Int>& b,
                const Int& two_h_a, const Int& two_h_b)
{
    Int kinetic(0);
    for (std::size_t k = 0; k < spec.dim; ++k)
        kinetic += (b.p[k] + a.p[k]) * (b.x[k] - a.x[k]);
    const Int dtau = b.tau - a.tau;
    Int term = Int(2) * kinetic;
    term += (b.two_pi + a.two_pi) * dtau;
    term -= dtau * (two_h_b + two_h_a);
    term -= spec.lapse() * b.two_pi;
    return term;
}

template <ExactInteger Int>
void require_trajectory(const basic_trajectory<Int>& traj)
{
    traj.spec.validate();
    for (const auto& s : traj.slices)
        require_dim(traj.spec, s);
}

} // namespace detail

/// 2S: the integer action in doubled units, summed over every step of the trajectory.
template <ExactInteger Int>
Int action(const basic_trajectory<Int>& traj)
{
    if (traj.size() < 3)
        throw range_error("action needs at least 3 slices, trajectory has " + std::to_string(traj.size()));
    detail::require_trajectory(traj);
    std::vector<Int> two_h;
    two_h.reserve(traj.size());
    for (const auto& s : traj.slices)
        two_h.push_back(hamiltonian_doubled(traj.spec, s));
    Int total(0);
    for (std::size_t i = 1; i < traj.size(); ++i)
        total += detail::action_term(traj.spec, traj.slices[i - 1], traj.slices[i], two_h[i - 1], two_h[i]);
    return total;
}

enum class variable
{
    x,
    p,
    tau,
    pi
};

/// Which single variable to vary: slice position in the trajectory,
/// variable kind and (for x, p) the component.
struct variation_site
{
    std::size_t slice = 0;
    variable var = variable::x;
    std::size_t component = 0;
};

/// Symmetric integer variation [2S(f + delta) - 2S(f - delta)] / 2 at one
/// interior site. Endpoint slices are fixed boundary data.
///
/// Only the two steps adjacent to the site depend on it, so just those terms
/// are re-evaluated; the rest of the sum cancels exactly.
template <ExactInteger Int>
Int discrete_variation(const basic_trajectory<Int>& traj, const variation_site& site, const Int& delta)
{
    if (traj.size() < 3)
        throw range_error("variation needs at least 3 slices, trajectory has " + std::to_string(traj.size()));
    if (site.slice == 0 || site.slice + 1 >= traj.size())
        throw range_error("variation site " + std::to_string(site.slice) + " is not interior (trajectory has " +
                          std::to_string(traj.size()) + " slices)");
    if ((site.var == variable::x || site.var == variable::p) && site.component >= traj.spec.dim)
        throw range_error("component " + std::to_string(site.component) + " out of range for dim " +
                          std::to_string(traj.spec.dim));
    detail::require_trajectory(traj);

    const auto& spec = traj.spec;
    const auto& before = traj.slices[site.slice - 1];
    const auto& after = traj.slices[site.slice + 1];
    const Int two_h_before = hamiltonian_doubled(spec, before);
    const Int two_h_after = hamiltonian_doubled(spec, after);

    auto local = [&](const Int& shift) {
        basic_slice<Int> s = traj.slices[site.slice];
        switch (site.var)
        {
        case variable::x: s.x[site.component] += shift; break;
        case variable::p: s.p[site.component] += shift; break;
        case variable::tau: s.tau += shift; break;
        case variable::pi: s.two_pi += Int(2) * shift; break;
        }
        const Int two_h = hamiltonian_doubled(spec, s);
        return Int(detail::action_term(spec, before, s, two_h_before, two_h) +
                   detail::action_term(spec, s, after, two_h, two_h_after));
    };

    const Int diff = local(delta) - local(Int(Int(0) - delta));
    const Int half = diff / Int(2);
    if (!(Int(half * Int(2)) == diff))
        throw std::logic_error("odd action difference; doubled bookkeeping is broken");
    return half;
}

/// psi_n^dag G psidot_n + psidot_n^dag G psi_n with psidot_n = psi_{n+1} - psi_{n-1},
/// evaluated directly from three consecutive slices.
template <ExactInteger Int>
basic_gaussian<Int> conservation_residual(const basic_slice<Int>& prev, const basic_slice<Int>& curr,
                                          const basic_slice<Int>& next, const basic_gaussian_matrix<Int>& G)
{
    const std::size_t n = curr.dim();
    if (!G.is_square() || G.rows() != n || prev.dim() != n || next.dim() != n)
        throw dimension_error("conservation residual: G is " + shape(G) + ", slices have dim " + std::to_string(n));
    const auto psi = curr.psi();
    std::vector<basic_gaussian<Int>> dpsi(n);
    for (std::size_t a = 0; a < n; ++a)
        dpsi[a] = {Int(next.x[a] - prev.x[a]), Int(next.p[a] - prev.p[a])};

    using span_t = std::span<const basic_gaussian<Int>>;
    const auto g_dpsi = matvec(G, dpsi);
    if (is_self_adjoint(G))
        // the second term is the conjugate of the first
        return {Int(Int(2) * inner_re<Int>(span_t(psi), span_t(g_dpsi))), Int(0)};
    const auto first = inner<Int>(span_t(psi), span_t(g_dpsi));
    const auto g_psi = matvec(G, psi);
    return first + inner<Int>(span_t(dpsi), span_t(g_psi));
}

/// Same residual addressed by slice position n (1 <= n <= size-2).
template <ExactInteger Int>
basic_gaussian<Int> conservation_residual(const basic_trajectory<Int>& traj, const basic_gaussian_matrix<Int>& G,
                                          std::size_t n)
{
    if (n == 0 || n + 1 >= traj.size())
        throw range_error("conservation residual index " + std::to_string(n) + " is not interior (trajectory has " +
                          std::to_string(traj.size()) + " slices)");
    return conservation_residual(traj.slices[n - 1], traj.slices[n], traj.slices[n + 1], G);
}

/// Evaluates the conservation residual for a fixed (spec, G) through the
/// exact identity
///
///     R = i c psi^dag [H, G] psi + psi^dag G e + e^dag G psi,
///     e = psidot + i c H psi,
///
/// which holds for any three slices. The equation-of-motion defect e is
/// linear-cost; products of large entries are only formed for nonzero
/// entries of [H, G] or a nonzero defect. Agrees with conservation_residual
/// on every input.
template <ExactInteger Int>
class basic_conservation_monitor
{
public:
    basic_conservation_monitor(basic_automaton_spec<Int> spec, basic_gaussian_matrix<Int> G)
        : spec_(std::move(spec)), G_(std::move(G))
    {
        spec_.validate();
        if (!G_.is_square() || G_.rows() != spec_.dim)
            throw dimension_error("monitor: G is " + shape(G_) + ", automaton dim " + std::to_string(spec_.dim));
        const auto H = spec_.hamiltonian();
        C_ = H * G_ - G_ * H;
        commuting_ = C_.is_zero();
    }

    bool commuting() const noexcept { return commuting_; }

    basic_gaussian<Int> residual(const basic_slice<Int>& prev, const basic_slice<Int>& curr,
                                 const basic_slice<Int>& next) const
    {
        detail::require_dim(spec_, prev);
        detail::require_dim(spec_, curr);
        detail::require_dim(spec_, next);
        using span_t = std::span<const basic_gaussian<Int>>;
        const std::size_t n = spec_.dim;
        const Int c = spec_.lapse();
        const auto h = detail::apply_h(spec_, curr);

        std::vector<basic_gaussian<Int>> e(n);
        bool defect = false;
        for (std::size_t a = 0; a < n; ++a)
        {
            e[a].re = next.x[a] - prev.x[a] - c * h.im[a];
            e[a].im = next.p[a] - prev.p[a] + c * h.re[a];
            defect = defect || !e[a].is_zero();
        }

        basic_gaussian<Int> r;
        const auto psi = curr.psi();
        if (!commuting_)
        {
            const auto c_psi = matvec(C_, psi);
            const auto q = inner<Int>(span_t(psi), span_t(c_psi));
            // i c q
            r += basic_gaussian<Int>(Int(Int(0) - c * q.im), Int(c * q.re));
        }
        if (defect)
        {
            const auto g_e = matvec(G_, e);
            const auto g_psi = matvec(G_, psi);
            r += inner<Int>(span_t(psi), span_t(g_e));
            r += inner<Int>(span_t(e), span_t(g_psi));
        }
        return r;
    }

private:
    basic_automaton_spec<Int> spec_;
    basic_gaussian_matrix<Int> G_;
    basic_gaussian_matrix<Int> C_;
    bool commuting_ = false;
};

/// 2(O_{n+1}O'_{n+1} - O_{n-1}O'_{n-1}) minus
/// (Odot_n [O'_{n+1} + O'_{n-1}] + [O_{n+1} + O_{n-1}] O'dot_n): the discrete
/// product rule in doubled form. Zero for any integer sequences.
template <ExactInteger Int>
Int leibniz_defect(std::span<const Int> O, std::span<const Int> Op, std::size_t n)
{
    if (O.size() != Op.size())
        throw dimension_error("Leibniz check needs sequences of equal length");
    if (n == 0 || n + 1 >= O.size())
        throw range_error("Leibniz check index " + std::to_string(n) + " is not interior");
    const Int& a = O[n + 1];
    const Int& b = O[n - 1];
    const Int& c = Op[n + 1];
    const Int& d = Op[n - 1];
    const Int lhs = Int(2) * (a * c - b * d);
    const Int rhs = (a - b) * (c + d) + (a + b) * (c - d);
    return lhs - rhs;
}

/// 2pi_n - 2H_n; constant along the even and along the odd slices of any
/// trajectory that obeys the update rule.
template <ExactInteger Int>
Int pi_offset(const basic_automaton_spec<Int>& spec, const basic_slice<Int>& s)
{
    return s.two_pi - hamiltonian_doubled(spec, s);
}

using AutomatonSpec = basic_automaton_spec<BigInt>;
using Slice = basic_slice<BigInt>;
using StatePair = basic_state_pair<BigInt>;
using Trajectory = basic_trajectory<BigInt>;
using Stepper = basic_stepper<BigInt>;
using ConservationMonitor = basic_conservation_monitor<BigInt>;

} // namespace hamca
