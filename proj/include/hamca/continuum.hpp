#pragma once

// Bandlimited continuum picture of a CA trajectory: sinc reconstruction of
// the samples psi_n at t_n = n l, the finite-difference Schroedinger form
// sinh(l d/dt) psi = -i H psi, the arcsin dispersion relation, and the
// continuum conservation laws and two-time functions.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hamca/automaton.hpp"
#include "hamca/error.hpp"
#include "hamca/exactmath.hpp"

namespace hamca
{

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

inline constexpr double hermitian_tolerance = 1e-12;
inline constexpr double band_edge_tolerance = 1e-12;
inline constexpr std::size_t default_guard_band = 10;

inline bool is_hermitian(const cmat& M, double tol = hermitian_tolerance)
{
    return M.rows() == M.cols() && (M - M.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline void require_hermitian(const cmat& M, const char* what)
{
    if (M.rows() != M.cols() || M.rows() == 0)
        throw dimension_error(std::string(what) + " must be a non-empty square matrix");
    if (!is_hermitian(M))
        throw precondition_error(std::string(what) + " is not Hermitian within " +
                                 std::to_string(hermitian_tolerance));
}

template <ExactInteger Int>
cplx to_complex(const basic_gaussian<Int>& z)
{
    return {to_double_exact(z.re), to_double_exact(z.im)};
}

template <ExactInteger Int>
cmat to_complex(const basic_gaussian_matrix<Int>& M)
{
    cmat r(static_cast<Eigen::Index>(M.rows()), static_cast<Eigen::Index>(M.cols()));
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j)
            r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_complex(M(i, j));
    return r;
}

template <ExactInteger Int>
cvec to_complex(const basic_slice<Int>& s)
{
    cvec r(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t a = 0; a < s.dim(); ++a)
        r(static_cast<Eigen::Index>(a)) = cplx(to_double_exact(s.x[a]), to_double_exact(s.p[a]));
    return r;
}

/// Samples psi(n l) for n in [n_min, n_max]; evaluates the truncated
/// Shannon series between them. The band limit is pi / l.
class sampled_wave
{
public:
    sampled_wave(double scale_l, std::int64_t n_min, std::vector<cvec> samples,
                 std::size_t guard = default_guard_band)
        : scale_l_(scale_l), n_min_(n_min), samples_(std::move(samples)), guard_(guard)
    {
        if (!(scale_l_ > 0.0) || !std::isfinite(scale_l_))
            throw precondition_error("scale l must be positive and finite");
        if (samples_.empty())
            throw range_error("sampled wave needs a non-empty window");
        const auto d = samples_.front().size();
        for (const auto& s : samples_)
            if (s.size() != d)
                throw dimension_error("samples of differing length");
    }

    /// Wave of a CA trajectory. The bridge is defined for lapse c = 2 only.
    template <ExactInteger Int>
    static sampled_wave from_trajectory(const basic_trajectory<Int>& traj, double scale_l,
                                        std::size_t guard = default_guard_band)
    {
        if (traj.spec.lapse_c != 2)
            throw precondition_error("continuum bridge requires lapse c = 2, trajectory has c = " +
                                     std::to_string(traj.spec.lapse_c));
        if (traj.slices.empty())
            throw range_error("empty trajectory");
        std::vector<cvec> samples;
        samples.reserve(traj.size());
        for (std::size_t k = 0; k < traj.size(); ++k)
        {
            if (traj.slices[k].n != traj.slices.front().n + static_cast<std::int64_t>(k))
                throw range_error("trajectory slice indices are not consecutive");
            samples.push_back(to_complex(traj.slices[k]));
        }
        return {scale_l, traj.slices.front().n, std::move(samples), guard};
    }

    double scale() const noexcept { return scale_l_; }
    double bandwidth() const noexcept { return std::numbers::pi / scale_l_; }
    std::int64_t n_min() const noexcept { return n_min_; }
    std::int64_t n_max() const noexcept { return n_min_ + static_cast<std::int64_t>(samples_.size()) - 1; }
    std::size_t guard() const noexcept { return guard_; }
    Eigen::Index dim() const noexcept { return samples_.front().size(); }
    const std::vector<cvec>& samples() const noexcept { return samples_; }
    const cvec& sample(std::int64_t n) const { return samples_.at(static_cast<std::size_t>(n - n_min_)); }

    /// Throws unless [t_lo, t_hi] keeps `guard` samples away from both window edges.
    void require_inside(double t_lo, double t_hi) const
    {
        const double lo = static_cast<double>(n_min_ + static_cast<std::int64_t>(guard_)) * scale_l_;
        const double hi = static_cast<double>(n_max() - static_cast<std::int64_t>(guard_)) * scale_l_;
        if (!(t_lo >= lo && t_hi <= hi))
            throw range_error("time range [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                              "] violates the guard band; usable range is [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    }

    cvec operator()(double t) const;

private:
    double scale_l_;
    std::int64_t n_min_;
    std::vector<cvec> samples_;
    std::size_t guard_;
};

/// f(t) = sum_n f(t_n) sin[w(t - t_n)] / [w(t - t_n)], w = pi / l, over the window.
///
/// sin(pi (u - n)) is written as (-1)^(k-n) sin(pi r) with u = k + r, so the
/// kernel is exactly 1 or 0 at grid points and the sum needs one sine.
inline cvec reconstruct(const sampled_wave& wave, double t)
{
    if (!std::isfinite(t))
        throw range_error("reconstruction time must be finite");
    const double u = t / wave.scale();
    const double k = std::nearbyint(u);
    const double r = u - k;
    cvec acc = cvec::Zero(wave.dim());
    if (r == 0.0)
    {
        const auto kn = static_cast<std::int64_t>(k);
        if (kn >= wave.n_min() && kn <= wave.n_max())
            acc = wave.sample(kn);
        return acc;
    }
    const double s = std::sin(std::numbers::pi * r) / std::numbers::pi;
    const auto ki = static_cast<std::int64_t>(k);
    for (std::int64_t n = wave.n_min(); n <= wave.n_max(); ++n)
    {
        const std::int64_t m = ki - n;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        acc += wave.sample(n) * (sign * s / (r + static_cast<double>(m)));
    }
    return acc;
}

inline cvec sampled_wave::operator()(double t) const { return reconstruct(*this, t); }

/// A finite sum of stationary modes exp(-i E t) v, evaluated in closed form.
struct wave_mode
{
    double energy = 0.0;
    cvec amplitude;
};

class modal_wave
{
public:
    modal_wave(double scale_l, std::vector<wave_mode> modes) : scale_l_(scale_l), modes_(std::move(modes))
    {
        if (!(scale_l_ > 0.0))
            throw precondition_error("scale l must be positive");
        if (modes_.empty())
            throw range_error("modal wave needs at least one mode");
    }

    /// Solution of sinh(l d/dt) psi = -i H psi with psi(0) = psi0; every
    /// eigencomponent of psi0 must be in band (|eps| <= 1).
    static modal_wave from_hamiltonian(const cmat& H, const cvec& psi0, double scale_l);

    double scale() const noexcept { return scale_l_; }
    const std::vector<wave_mode>& modes() const noexcept { return modes_; }
    void require_inside(double, double) const noexcept {}

    cvec operator()(double t) const
    {
        cvec acc = cvec::Zero(modes_.front().amplitude.size());
        for (const auto& m : modes_)
            acc += std::exp(cplx(0.0, -m.energy * t)) * m.amplitude;
        return acc;
    }

private:
    double scale_l_;
    std::vector<wave_mode> modes_;
};

/// Anything that can be evaluated at a time and knows its scale l.
template <class W>
concept continuous_wave = requires(const W& w, double t) {
    { w(t) } -> std::convertible_to<cvec>;
    { w.scale() } -> std::convertible_to<double>;
    w.require_inside(t, t);
};

/// || (psi(t+l) - psi(t-l)) / 2 + i H psi(t) ||.
template <continuous_wave W>
double sinh_residual(const W& wave, const cmat& H, double t)
{
    const double l = wave.scale();
    wave.require_inside(t - l, t + l);
    const cvec psi = wave(t);
    if (H.rows() != psi.size() || H.cols() != psi.size())
        throw dimension_error("H does not match the wave dimension");
    const cvec d = 0.5 * (wave(t + l) - wave(t - l));
    return (d + cplx(0.0, 1.0) * (H * psi)).norm();
}

/// psi^dag G D + D^dag G psi with D = (1/i) sin(i l d/dt) psi = (psi(t+l) - psi(t-l)) / 2.
template <continuous_wave W>
double continuum_conservation_residual(const W& wave, const cmat& G, double t)
{
    require_hermitian(G, "G");
    const double l = wave.scale();
    wave.require_inside(t - l, t + l);
    const cvec psi = wave(t);
    if (G.rows() != psi.size())
        throw dimension_error("G does not match the wave dimension");
    const cvec d = 0.5 * (wave(t + l) - wave(t - l));
    const cplx v = psi.dot(G * d) + d.dot(G * psi);
    return v.real();
}

/// C_G(t1, t2) = Re psi(t1)^dag G psi(t2).
template <continuous_wave W>
double two_time(const W& wave, const cmat& G, double t1, double t2)
{
    require_hermitian(G, "G");
    wave.require_inside(std::min(t1, t2), std::max(t1, t2));
    const cvec a = wave(t1);
    if (G.rows() != a.size())
        throw dimension_error("G does not match the wave dimension");
    return a.dot(G * wave(t2)).real();
}

struct spectral_mode
{
    double epsilon = 0.0;
    /// E = arcsin(eps) / l when |eps| <= 1, empty when out of band.
    std::optional<double> energy;
    cvec eigvec;

    bool in_band() const noexcept { return energy.has_value(); }
};

struct spectrum_result
{
    double scale_l = 1.0;
    std::vector<spectral_mode> modes;
};

/// arcsin on the principal branch, snapping |eps| within tolerance of 1 to +-1.
inline std::optional<double> band_energy(double epsilon, double scale_l)
{
    const double a = std::abs(epsilon);
    if (a > 1.0 + band_edge_tolerance)
        return std::nullopt;
    const double e = a >= 1.0 - band_edge_tolerance ? std::copysign(1.0, epsilon) : epsilon;
    return std::asin(e) / scale_l;
}

/// Leading terms of the modified dispersion: (eps + eps^3 / 6) / l.
inline double dispersion_series(double epsilon, double scale_l = 1.0)
{
    return (epsilon + epsilon * epsilon * epsilon / 6.0) / scale_l;
}

/// Eigenvalues eps of a Hermitian H (ascending) with their energies.
inline spectrum_result spectrum(const cmat& H, double scale_l)
{
    require_hermitian(H, "Hamiltonian");
    if (!(scale_l > 0.0))
        throw precondition_error("scale l must be positive");
    const cmat Hs = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<cmat> solver(Hs);
    if (solver.info() != Eigen::Success)
        throw precondition_error("eigendecomposition failed");
    spectrum_result r{scale_l, {}};
    for (Eigen::Index k = 0; k < Hs.rows(); ++k)
    {
        const double eps = solver.eigenvalues()(k);
        r.modes.push_back({eps, band_energy(eps, scale_l), solver.eigenvectors().col(k)});
    }
    return r;
}

inline modal_wave modal_wave::from_hamiltonian(const cmat& H, const cvec& psi0, double scale_l)
{
    if (psi0.size() != H.rows())
        throw dimension_error("psi0 does not match H");
    const auto spec = spectrum(H, scale_l);
    std::vector<wave_mode> modes;
    for (const auto& m : spec.modes)
    {
        const cplx coeff = m.eigvec.dot(psi0);
        if (!m.in_band())
        {
            if (std::abs(coeff) > 1e-12)
                throw band_error("psi0 has weight on an out-of-band mode (eps = " + std::to_string(m.epsilon) + ")");
            continue;
        }
        modes.push_back({*m.energy, coeff * m.eigvec});
    }
    return {scale_l, std::move(modes)};
}

enum class stability
{
    stable,
    marginal,
    unstable
};

inline const char* to_string(stability s)
{
    switch (s)
    {
    case stability::stable: return "stable";
    case stability::marginal: return "marginal";
    case stability::unstable: return "unstable";
    }
    return "?";
}

/// Roots of lambda^2 + i c eps lambda - 1 = 0, the per-step multipliers of
/// psi_{n+1} = psi_{n-1} - i c eps psi_n.
///
/// roots[0] is the physical root (continuous with lambda = 1 at eps = 0;
/// the growing root when unstable), roots[1] the parasitic one.
struct step_eigenphase_result
{
    double epsilon = 0.0;
    std::int64_t lapse_c = 2;
    std::pair<cplx, cplx> roots;
    stability kind = stability::stable;

    double growth() const noexcept { return std::max(std::abs(roots.first), std::abs(roots.second)); }
};

inline step_eigenphase_result step_eigenphase(double epsilon, std::int64_t lapse_c)
{
    const double b = static_cast<double>(lapse_c) * epsilon;
    const double ab = std::abs(b);
    step_eigenphase_result r{epsilon, lapse_c, {}, stability::stable};
    if (std::abs(ab - 2.0) <= 2.0 * band_edge_tolerance)
    {
        const cplx lam(0.0, -std::copysign(1.0, b));
        r.roots = {lam, lam};
        r.kind = stability::marginal;
    }
    else if (ab < 2.0)
    {
        const double s = std::sqrt(4.0 - b * b);
        r.roots = {cplx(s / 2.0, -b / 2.0), cplx(-s / 2.0, -b / 2.0)};
    }
    else
    {
        // lambda = -i y with y^2 - b y + 1 = 0
        const double s = std::sqrt(b * b - 4.0);
        const double big = (b + std::copysign(s, b)) / 2.0;
        r.roots = {cplx(0.0, -big), cplx(0.0, -1.0 / big)};
        r.kind = stability::unstable;
    }
    return r;
}

} // namespace hamca
