#pragma once

// The invariant suite behind `hamca verify`.

#include <cstddef>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "hamca/automaton.hpp"
#include "hamca/exactmath.hpp"

namespace hamca
{

struct check_result
{
    std::string name;
    bool pass = true;
    std::string detail;
};

struct verification_report
{
    std::vector<check_result> checks;

    bool all_pass() const
    {
        for (const auto& c : checks)
            if (!c.pass)
                return false;
        return true;
    }
};

struct verify_options
{
    /// Seed pair the trajectory is expected to start with.
    std::optional<StatePair> expected_seed;
    /// Recorded 2H per slice, e.g. the two_H column of a trajectory file.
    std::optional<std::vector<BigInt>> recorded_two_H;
    int max_delta = 3;
};

namespace detail
{

inline std::string slice_label(const Slice& s) { return "n=" + std::to_string(s.n); }

inline check_result check_reversibility(const Trajectory& traj)
{
    check_result r{"reversibility", true, ""};
    if (traj.size() < 2)
        return {r.name, true, "fewer than two slices"};
    const std::size_t last = traj.size() - 2;
    Stepper st(traj.spec, traj.pair_at(last));
    for (std::size_t k = 0; k < last; ++k)
        st.retreat();
    if (!(st.state() == traj.pair_at(0)))
        return {r.name, false, "backward evolution from the final pair does not restore the first pair"};
    Stepper fwd(traj.spec, traj.pair_at(0));
    for (std::size_t k = 0; k < last; ++k)
        fwd.advance();
    if (!(fwd.state() == traj.pair_at(last)))
        return {r.name, false, "forward evolution from the first pair does not reach the final pair"};
    return r;
}

inline check_result check_equations_of_motion(const Trajectory& traj)
{
    for (std::size_t k = 1; k + 1 < traj.size(); ++k)
        if (!satisfies_equations_of_motion(traj.spec, traj.slices[k - 1], traj.slices[k], traj.slices[k + 1]))
            return {"equations_of_motion", false, "violated at " + slice_label(traj.slices[k + 1])};
    return {"equations_of_motion", true, ""};
}

inline check_result check_variation(const Trajectory& traj, int max_delta)
{
    check_result r{"action_variation", true, ""};
    if (traj.size() < 3)
        return {r.name, true, "no interior slices"};
    std::size_t sites = 0;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k)
    {
        std::vector<variation_site> all;
        for (std::size_t a = 0; a < traj.spec.dim; ++a)
        {
            all.push_back({k, variable::x, a});
            all.push_back({k, variable::p, a});
        }
        all.push_back({k, variable::tau, 0});
        all.push_back({k, variable::pi, 0});
        for (const auto& site : all)
        {
            ++sites;
            for (int d = -max_delta; d <= max_delta; ++d)
            {
                const BigInt v = discrete_variation(traj, site, BigInt(d));
                if (v != 0)
                {
                    static constexpr const char* names[] = {"x", "p", "tau", "pi"};
                    return {r.name, false,
                            std::string("nonzero variation ") + v.get_str() + " at " + slice_label(traj.slices[k]) +
                                " var " + names[static_cast<int>(site.var)] + "[" + std::to_string(site.component) +
                                "] delta " + std::to_string(d)};
                }
            }
        }
    }
    r.detail = std::to_string(sites) + " sites";
    return r;
}

inline check_result check_conservation(const Trajectory& traj, const GaussianMatrix& G, const std::string& label)
{
    const std::string name = "conservation_G=" + label;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k)
    {
        const auto r = conservation_residual(traj, G, k);
        if (!r.is_zero())
        {
            std::ostringstream os;
            os << "residual " << r << " at " << slice_label(traj.slices[k]);
            return {name, false, os.str()};
        }
    }
    return {name, true, ""};
}

inline check_result check_leibniz(const Trajectory& traj)
{
    const std::size_t n = traj.spec.dim;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
        {
            std::vector<BigInt> O;
            std::vector<BigInt> Op;
            for (const auto& s : traj.slices)
            {
                O.push_back(s.x[a]);
                Op.push_back(s.p[b]);
            }
            for (std::size_t k = 1; k + 1 < O.size(); ++k)
                if (leibniz_defect<BigInt>(std::span<const BigInt>(O), std::span<const BigInt>(Op), k) != 0)
                    return {"leibniz", false, "defect for x" + std::to_string(a) + ", p" + std::to_string(b)};
        }
    return {"leibniz", true, ""};
}

inline check_result check_pi_chains(const Trajectory& traj)
{
    for (std::size_t k = 2; k < traj.size(); ++k)
        if (pi_offset(traj.spec, traj.slices[k]) != pi_offset(traj.spec, traj.slices[k - 2]))
            return {"pi_parity_chains", false, "2pi - 2H changes at " + slice_label(traj.slices[k])};
    return {"pi_parity_chains", true, ""};
}

} // namespace detail

/// Runs every check; never throws on a failing invariant.
inline verification_report verify_trajectory(const Trajectory& traj, const verify_options& opts = {})
{
    traj.spec.validate();
    for (const auto& s : traj.slices)
        detail::require_dim(traj.spec, s);

    verification_report rep;
    if (opts.expected_seed)
    {
        const bool ok = traj.size() >= 2 && traj.pair_at(0) == *opts.expected_seed;
        rep.checks.push_back({"seed_match", ok, ok ? "" : "first two slices differ from the configured seed"});
    }
    if (opts.recorded_two_H)
    {
        check_result r{"record_two_H", true, ""};
        if (opts.recorded_two_H->size() != traj.size())
            r = {r.name, false, "record count differs from slice count"};
        else
            for (std::size_t k = 0; k < traj.size(); ++k)
                if ((*opts.recorded_two_H)[k] != hamiltonian_doubled(traj.spec, traj.slices[k]))
                {
                    r = {r.name, false, "two_H disagrees with x, p at " + detail::slice_label(traj.slices[k])};
                    break;
                }
        rep.checks.push_back(r);
    }

    rep.checks.push_back(detail::check_equations_of_motion(traj));
    rep.checks.push_back(detail::check_reversibility(traj));
    rep.checks.push_back(detail::check_variation(traj, opts.max_delta));

    const auto H = traj.spec.hamiltonian();
    rep.checks.push_back(detail::check_conservation(traj, GaussianMatrix::identity(traj.spec.dim), "I"));
    rep.checks.push_back(detail::check_conservation(traj, H, "H"));
    rep.checks.push_back(detail::check_conservation(traj, H * H, "H^2"));
    rep.checks.push_back(detail::check_leibniz(traj));
    rep.checks.push_back(detail::check_pi_chains(traj));
    return rep;
}

} // namespace hamca
