#pragma once

// From a physical Hamiltonian to an integer automaton and back: quantize
// h -> round(M h), classify the modes against the band |eps| <= 1, and
// compare the reconstructed CA evolution against exact quantum evolution.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hamca/automaton.hpp"
#include "hamca/continuum.hpp"
#include "hamca/error.hpp"
#include "hamca/exactmath.hpp"

namespace hamca
{

/// i d/dt' psi = eps_phys h psi with a dimensionless O(1) Hermitian h,
/// quantization scale M and time rescaling M' > M (hbar = 1).
struct physical_problem
{
    cmat h;
    double eps_phys = 1.0;
    std::int64_t scale_M = 1;
    std::int64_t time_scale_Mprime = 2;

    void validate() const
    {
        require_hermitian(h, "h");
        if (scale_M < 1)
            throw precondition_error("M must be at least 1");
        if (time_scale_Mprime <= scale_M)
            throw precondition_error("M' must exceed M");
        if (!(eps_phys > 0.0))
            throw precondition_error("eps_phys must be positive");
    }
};

struct band_mode
{
    double epsilon = 0.0;
    stability kind = stability::stable;
    double growth = 1.0;

    bool in_band() const noexcept { return kind != stability::unstable; }
};

struct band_report_result
{
    std::int64_t lapse_c = 2;
    std::vector<band_mode> modes;

    bool any_out_of_band() const
    {
        return std::any_of(modes.begin(), modes.end(), [](const band_mode& m) { return !m.in_band(); });
    }

    bool all_out_of_band() const
    {
        return std::none_of(modes.begin(), modes.end(), [](const band_mode& m) { return m.in_band(); });
    }

    double max_growth() const
    {
        double g = 1.0;
        for (const auto& m : modes)
            g = std::max(g, m.growth);
        return g;
    }
};

/// Per-mode stability of the CA recursion for a Hermitian H and lapse c.
inline band_report_result band_report(const cmat& H, std::int64_t lapse_c)
{
    const auto spec = spectrum(H, 1.0);
    band_report_result r{lapse_c, {}};
    for (const auto& m : spec.modes)
    {
        const auto ph = step_eigenphase(m.epsilon, lapse_c);
        r.modes.push_back({m.epsilon, ph.kind, ph.growth()});
    }
    return r;
}

template <ExactInteger Int>
band_report_result band_report(const basic_gaussian_matrix<Int>& H_int, std::int64_t lapse_c)
{
    if (!is_self_adjoint(H_int))
        throw precondition_error("integer Hamiltonian is not self-adjoint");
    return band_report(to_complex(H_int), lapse_c);
}

struct quantization_report
{
    GaussianMatrix H_int;
    /// max over entries and real/imaginary parts of |H/M - h| after mirroring
    double elem_err = 0.0;
    /// same, for entrywise rounding before the upper triangle is mirrored
    double elem_err_raw = 0.0;
    double spectral_radius = 0.0;
    std::vector<double> epsilons;
    std::vector<std::size_t> in_band_modes;
    std::vector<std::size_t> out_band_modes;
    std::vector<double> growth_rates;
};

/// H = round(M Re h) + i round(M Im h) on the upper triangle, mirrored so
/// that H is exactly self-adjoint (diagonal imaginary parts are zero).
inline quantization_report quantize(const physical_problem& problem, std::int64_t lapse_c = 2)
{
    problem.validate();
    const auto n = static_cast<std::size_t>(problem.h.rows());
    const double M = static_cast<double>(problem.scale_M);
    quantization_report r;
    r.H_int = GaussianMatrix(n, n);

    auto rounded = [&](cplx v) { return GaussianInteger(round_to_bigint(M * v.real()), round_to_bigint(M * v.imag())); };
    auto component_err = [&](const GaussianInteger& q, cplx v) {
        return std::max(std::abs(q.re.get_d() / M - v.real()), std::abs(q.im.get_d() / M - v.imag()));
    };

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            const cplx v = problem.h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            r.elem_err_raw = std::max(r.elem_err_raw, component_err(rounded(v), v));
            if (i == j)
                r.H_int(i, i) = GaussianInteger(round_to_bigint(M * v.real()), BigInt(0));
            else if (i < j)
            {
                r.H_int(i, j) = rounded(v);
                r.H_int(j, i) = conj(r.H_int(i, j));
            }
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r.elem_err = std::max(r.elem_err, component_err(r.H_int(i, j), problem.h(static_cast<Eigen::Index>(i),
                                                                                  static_cast<Eigen::Index>(j))));

    const auto bands = band_report(r.H_int, lapse_c);
    for (std::size_t k = 0; k < bands.modes.size(); ++k)
    {
        const auto& m = bands.modes[k];
        r.epsilons.push_back(m.epsilon);
        r.spectral_radius = std::max(r.spectral_radius, std::abs(m.epsilon));
        (m.in_band() ? r.in_band_modes : r.out_band_modes).push_back(k);
        r.growth_rates.push_back(m.growth);
    }
    return r;
}

/// One time point of a CA-vs-QM comparison, in units of l. All components
/// are norms of differences; total <= sum of the others.
struct comparison_row
{
    double t = 0.0;
    double physical_time = 0.0;
    double total = 0.0;
    /// exact evolution under H_int / M versus under h
    double hamiltonian_quantization = 0.0;
    /// arcsin-dispersed evolution versus exact evolution under H_int (admitted modes)
    double dispersion = 0.0;
    /// out-of-band part of psi0, which the CA run does not carry
    double discarded = 0.0;
    /// reconstructed integer CA run versus reconstructed exact CA-mode samples
    double rounding = 0.0;
    /// sinc reconstruction of exact CA-mode samples versus the closed form
    double truncation = 0.0;
};

struct comparison_options
{
    /// Evaluation times in units of l; empty means 0, 0.5, ..., steps.
    std::vector<double> times;
    /// Extra slices evolved before 0 and after `steps` so that evaluation
    /// times stay clear of the reconstruction window edges.
    std::size_t pad = 200;
    evolve_options evolve;
};

struct comparison_report
{
    quantization_report quantization;
    std::int64_t amplitude_Q = 1;
    std::size_t steps = 0;
    double discarded_weight = 0.0;
    /// max over populated admitted modes of |arcsin(eps) - eps|, radians per l
    double dispersion_phase_rate = 0.0;
    /// a marginal mode was seeded off its double root and grows linearly in n
    bool marginal_secular = false;
    Trajectory trajectory;
    std::vector<comparison_row> rows;

    double max_component(double comparison_row::*field) const
    {
        double m = 0.0;
        for (const auto& r : rows)
            m = std::max(m, r.*field);
        return m;
    }
};

namespace detail
{

inline std::vector<BigInt> rounded_part(const cvec& v, double Q, bool imag)
{
    std::vector<BigInt> r;
    for (Eigen::Index k = 0; k < v.size(); ++k)
        r.push_back(round_to_bigint(Q * (imag ? v(k).imag() : v(k).real())));
    return r;
}

} // namespace detail

/// Seeds the CA from psi0 scaled by Q, evolves it exactly, reconstructs the
/// continuum wave and compares with exp(-i M h t) psi0 from an independent
/// eigendecomposition of h.
///
/// psi0 is projected onto in-band and marginal modes of H_int; the second
/// seed slice uses the exact CA mode phases exp(-i arcsin eps) so the
/// parasitic root of the recursion is not excited.
inline comparison_report simulate_vs_exact(const physical_problem& problem, const cvec& psi0, std::int64_t Q,
                                           std::size_t steps, const comparison_options& opts = {})
{
    comparison_report rep;
    rep.quantization = quantize(problem, 2);
    rep.amplitude_Q = Q;
    rep.steps = steps;
    const auto& H_int = rep.quantization.H_int;
    const auto n = static_cast<Eigen::Index>(H_int.rows());
    if (psi0.size() != n)
        throw dimension_error("psi0 has length " + std::to_string(psi0.size()) + ", h is " + std::to_string(n) +
                              "-dimensional");
    if (Q < 1)
        throw precondition_error("amplitude scale Q must be positive");
    if (opts.pad <= default_guard_band)
        throw precondition_error("pad must exceed the guard band");

    const cmat Hq = to_complex(H_int);
    Eigen::SelfAdjointEigenSolver<cmat> eq(Hq);
    const Eigen::VectorXd eps = eq.eigenvalues();
    const cmat V = eq.eigenvectors();
    const cvec a = V.adjoint() * psi0;

    std::vector<Eigen::Index> admitted;
    for (Eigen::Index k = 0; k < n; ++k)
        if (std::abs(eps(k)) <= 1.0 + band_edge_tolerance)
            admitted.push_back(k);
    if (admitted.empty())
        throw band_error("all modes of the quantized Hamiltonian are out of band (spectral radius " +
                         std::to_string(rep.quantization.spectral_radius) + ")");

    auto ca_phase = [&](Eigen::Index k) { return *band_energy(eps(k), 1.0); };

    auto modified = [&](double s) {
        cvec v = cvec::Zero(n);
        for (auto k : admitted)
            v += std::exp(cplx(0.0, -ca_phase(k) * s)) * a(k) * V.col(k);
        return v;
    };
    auto is_admitted = [&](Eigen::Index k) { return std::find(admitted.begin(), admitted.end(), k) != admitted.end(); };
    // exact evolution under H_int restricted to admitted modes, or over all modes
    auto exact_hq = [&](double s, bool admitted_only) {
        cvec v = cvec::Zero(n);
        for (Eigen::Index k = 0; k < n; ++k)
            if (!admitted_only || is_admitted(k))
                v += std::exp(cplx(0.0, -eps(k) * s)) * a(k) * V.col(k);
        return v;
    };
    auto exact_hq_discarded = [&](double s) {
        cvec v = cvec::Zero(n);
        for (Eigen::Index k = 0; k < n; ++k)
            if (!is_admitted(k))
                v += std::exp(cplx(0.0, -eps(k) * s)) * a(k) * V.col(k);
        return v;
    };

    // independent oracle: eigendecomposition of M h
    const double M = static_cast<double>(problem.scale_M);
    Eigen::SelfAdjointEigenSolver<cmat> eh(0.5 * (problem.h + problem.h.adjoint()));
    const Eigen::VectorXd eh_vals = eh.eigenvalues();
    const cmat W = eh.eigenvectors();
    const cvec b = W.adjoint() * psi0;
    auto exact_h = [&](double s) {
        cvec v = cvec::Zero(n);
        for (Eigen::Index k = 0; k < n; ++k)
            v += std::exp(cplx(0.0, -M * eh_vals(k) * s)) * b(k) * W.col(k);
        return v;
    };

    rep.discarded_weight = exact_hq_discarded(0.0).norm();
    for (auto k : admitted)
        if (std::abs(a(k)) > 1e-12)
            rep.dispersion_phase_rate = std::max(rep.dispersion_phase_rate, std::abs(ca_phase(k) - eps(k)));

    // integer seeds
    const double q = static_cast<double>(Q);
    const cvec seed0 = modified(0.0);
    const cvec seed1 = modified(1.0);
    Slice s0{0, detail::rounded_part(seed0, q, false), detail::rounded_part(seed0, q, true), BigInt(0), BigInt(0)};
    Slice s1{1, detail::rounded_part(seed1, q, false), detail::rounded_part(seed1, q, true), BigInt(1), BigInt(0)};
    const bool all_zero = std::all_of(s0.x.begin(), s0.x.end(), [](const BigInt& v) { return v == 0; }) &&
                          std::all_of(s0.p.begin(), s0.p.end(), [](const BigInt& v) { return v == 0; });
    if (all_zero)
        throw precondition_error("amplitude scale Q = " + std::to_string(Q) + " rounds the seed to the zero vector");

    const auto parts = split_hamiltonian(H_int);
    const AutomatonSpec spec{static_cast<std::size_t>(n), parts, 2};
    s0.two_pi = hamiltonian_doubled(spec, s0);
    s1.two_pi = hamiltonian_doubled(spec, s1);

    // marginal modes seeded off their double root grow linearly
    {
        const cvec c0 = to_complex(s0) / q;
        const cvec c1 = to_complex(s1) / q;
        for (auto k : admitted)
        {
            if (step_eigenphase(eps(k), 2).kind != stability::marginal)
                continue;
            const cplx lam(0.0, -std::copysign(1.0, eps(k)));
            const cplx a0 = V.col(k).dot(c0);
            const cplx a1 = V.col(k).dot(c1);
            if (std::abs(a1 / lam - a0) > 1e-12 * std::max(1.0, std::abs(a0)))
                rep.marginal_secular = true;
        }
    }

    rep.trajectory = evolve_around(spec, StatePair{s0, s1}, opts.pad, steps + opts.pad, opts.evolve);

    std::vector<cvec> ca_samples;
    std::vector<cvec> mod_samples;
    for (const auto& sl : rep.trajectory.slices)
    {
        ca_samples.push_back(to_complex(sl) / q);
        mod_samples.push_back(modified(static_cast<double>(sl.n)));
    }
    const std::int64_t n_min = rep.trajectory.slices.front().n;
    const sampled_wave ca_wave(1.0, n_min, std::move(ca_samples));
    const sampled_wave mod_wave(1.0, n_min, std::move(mod_samples));

    std::vector<double> times = opts.times;
    if (times.empty())
        for (std::size_t k = 0; k <= 2 * steps; ++k)
            times.push_back(0.5 * static_cast<double>(k));

    for (double s : times)
    {
        ca_wave.require_inside(s, s);
        const cvec ca = ca_wave(s);
        const cvec rec_mod = mod_wave(s);
        const cvec mod = modified(s);
        const cvec hq_adm = exact_hq(s, true);
        const cvec hq_all = exact_hq(s, false);
        const cvec h_exact = exact_h(s);
        comparison_row row;
        row.t = s;
        row.physical_time = s * M / problem.eps_phys;
        row.total = (ca - h_exact).norm();
        row.rounding = (ca - rec_mod).norm();
        row.truncation = (rec_mod - mod).norm();
        row.dispersion = (mod - hq_adm).norm();
        row.discarded = (hq_adm - hq_all).norm();
        row.hamiltonian_quantization = (hq_all - h_exact).norm();
        rep.rows.push_back(row);
    }
    return rep;
}

struct convergence_row
{
    std::int64_t M = 1;
    double elem_err = 0.0;
    double elem_err_raw = 0.0;
};

struct convergence_table
{
    std::vector<convergence_row> rows;
    /// least-squares slope of log(elem_err) against log(M) over nonzero errors
    std::optional<double> slope;
    bool exactly_representable = false;
};

/// elem_err(M) for each M and the fitted log-log slope.
inline convergence_table convergence_study(const cmat& h, const std::vector<std::int64_t>& Ms)
{
    if (Ms.size() < 3)
        throw precondition_error("convergence study needs at least 3 values of M");
    for (std::size_t k = 1; k < Ms.size(); ++k)
        if (Ms[k] <= Ms[k - 1])
            throw precondition_error("M values must be strictly increasing");

    convergence_table t;
    std::vector<double> lx;
    std::vector<double> ly;
    for (auto M : Ms)
    {
        const auto q = quantize(physical_problem{h, 1.0, M, M + 1});
        t.rows.push_back({M, q.elem_err, q.elem_err_raw});
        if (q.elem_err > 0.0)
        {
            lx.push_back(std::log(static_cast<double>(M)));
            ly.push_back(std::log(q.elem_err));
        }
    }
    t.exactly_representable = lx.empty();
    if (lx.size() >= 2)
    {
        const double k = static_cast<double>(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i)
        {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        t.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    }
    return t;
}

/// Random Hermitian matrix with real and imaginary parts uniform in [-1, 1],
/// reproducible from the seed on any platform.
inline cmat random_hermitian(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    auto uniform = [&] { return 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0; };
    cmat h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < h.rows(); ++i)
    {
        h(i, i) = cplx(uniform(), 0.0);
        for (Eigen::Index j = i + 1; j < h.cols(); ++j)
        {
            const double re = uniform();
            const double im = uniform();
            h(i, j) = cplx(re, im);
            h(j, i) = cplx(re, -im);
        }
    }
    return h;
}

} // namespace hamca
