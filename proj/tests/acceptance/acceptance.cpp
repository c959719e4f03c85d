// Acceptance suite: one PASS/FAIL line per criterion, tolerances and time
// limits fixed below. Exit status is 0 only if every criterion passes.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "../unit/support.hpp"
#include "hamca.hpp"

using namespace hamca;

namespace
{

constexpr double pi = std::numbers::pi;

struct outcome
{
    bool pass = false;
    std::string detail;
};

class stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 3)
{
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

cmat pauli_x()
{
    cmat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

// 1. Exact conservation over long runs.
outcome exact_conservation()
{
    constexpr int specs = 100;
    constexpr int steps = 10'000;
    std::mt19937_64 rng(1001);
    std::size_t nonzero = 0;
    std::size_t checked = 0;
    std::size_t max_digits = 0;
    double evolve_time = 0.0;
    for (int run = 0; run < specs; ++run)
    {
        const std::size_t n = 1 + rng() % 4;
        const auto spec = test::random_spec(rng, n, 3, 2);
        const auto H = spec.hamiltonian();
        const GaussianMatrix Gs[] = {GaussianMatrix::identity(n), H, H * H};
        Stepper st(spec, test::random_pair(rng, n, 9));
        Slice before = st.state().prev;
        for (int k = 0; k < steps; ++k)
        {
            stopwatch sw;
            st.advance();
            evolve_time += sw.seconds();
            // the middle slice of (before, prev, curr) is interior
            for (const auto& G : Gs)
            {
                nonzero += conservation_residual(before, st.state().prev, st.state().curr, G).is_zero() ? 0 : 1;
                ++checked;
            }
            before = st.state().prev;
        }
        for (const auto& v : st.state().curr.x)
            max_digits = std::max(max_digits, decimal_digits(v));
    }
    return {nonzero == 0, std::to_string(checked) + " residuals (" + std::to_string(specs) + " specs x " +
                              std::to_string(steps) + " steps x 3 G), " + std::to_string(nonzero) +
                              " nonzero; entries reach " + std::to_string(max_digits) + " digits; evolution alone " +
                              fmt(evolve_time) + " s"};
}

// 2. Reversibility.
outcome reversibility()
{
    std::mt19937_64 rng(1002);
    int restored = 0;
    for (int run = 0; run < 500; ++run)
    {
        const std::size_t n = 1 + rng() % 4;
        const auto spec = test::random_spec(rng, n, 3, test::uniform(rng, -3, 3));
        const auto seed = test::random_pair(rng, n, 9);
        Stepper st(spec, seed);
        for (int k = 0; k < 50; ++k)
            st.advance();
        for (int k = 0; k < 50; ++k)
            st.retreat();
        restored += st.state() == seed ? 1 : 0;
    }
    return {restored == 500, std::to_string(restored) + "/500 seed pairs restored bit-exactly"};
}

bool any_nonzero_variation(const Trajectory& traj)
{
    for (std::size_t k = 1; k + 1 < traj.size(); ++k)
        for (int d = -3; d <= 3; ++d)
        {
            if (d == 0)
                continue;
            for (std::size_t a = 0; a < traj.spec.dim; ++a)
                for (auto v : {variable::x, variable::p})
                    if (discrete_variation(traj, {k, v, a}, BigInt(d)) != 0)
                        return true;
            for (auto v : {variable::tau, variable::pi})
                if (discrete_variation(traj, {k, v, 0}, BigInt(d)) != 0)
                    return true;
        }
    return false;
}

// 3. Stationary action iff equations of motion.
outcome action_principle()
{
    std::mt19937_64 rng(1003);
    std::size_t sites = 0;
    std::size_t nonzero = 0;
    int detected = 0;
    for (int run = 0; run < 50; ++run)
    {
        const std::size_t n = 1 + rng() % 4;
        const auto spec = test::random_spec(rng, n, 3, 2);
        auto traj = evolve(spec, test::random_pair(rng, n, 9), 8);
        for (std::size_t k = 1; k + 1 < traj.size(); ++k)
            for (int d = -3; d <= 3; ++d)
            {
                for (std::size_t a = 0; a < n; ++a)
                    for (auto v : {variable::x, variable::p})
                    {
                        nonzero += discrete_variation(traj, {k, v, a}, BigInt(d)) != 0 ? 1 : 0;
                        ++sites;
                    }
                for (auto v : {variable::tau, variable::pi})
                {
                    nonzero += discrete_variation(traj, {k, v, 0}, BigInt(d)) != 0 ? 1 : 0;
                    ++sites;
                }
            }

        auto& victim = traj.slices[rng() % traj.size()];
        const long amount = test::uniform(rng, 1, 5) * (rng() % 2 ? 1 : -1);
        switch (rng() % 4)
        {
        case 0: victim.x[rng() % n] += amount; break;
        case 1: victim.p[rng() % n] += amount; break;
        case 2: victim.tau += amount; break;
        default: victim.two_pi += amount; break;
        }
        detected += any_nonzero_variation(traj) ? 1 : 0;
    }
    return {nonzero == 0 && detected == 50, std::to_string(nonzero) + " nonzero of " + std::to_string(sites) +
                                                " variations on true trajectories; " + std::to_string(detected) +
                                                "/50 corruptions detected"};
}

// 4. Dispersion of the step multiplier.
outcome dispersion()
{
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    double worst_oracle = 0.0;
    for (int k = 0; k < 50; ++k)
    {
        double e = u(rng);
        while (std::abs(e) >= 1.0)
            e = u(rng);
        const auto ph = step_eigenphase(e, 2);
        worst = std::max(worst, std::abs(std::arg(ph.roots.first) + std::asin(e)));
        // independent quadratic formula for lambda^2 + 2 i e lambda - 1 = 0
        const std::complex<double> b(0.0, 2.0 * e);
        const std::complex<double> disc = std::sqrt(b * b + 4.0);
        const std::complex<double> r1 = (-b + disc) / 2.0;
        const std::complex<double> r2 = (-b - disc) / 2.0;
        const std::complex<double> stable = std::abs(std::arg(r1)) < std::abs(std::arg(r2)) ? r1 : r2;
        worst_oracle = std::max(worst_oracle, std::abs(std::arg(stable) + std::asin(e)));
    }
    const auto one = spectrum(cmat::Identity(1, 1), 1.0);
    const double edge = std::abs(*one.modes.at(0).energy - pi / 2);
    return {worst <= 1e-9 && worst_oracle <= 1e-9 && edge <= 1e-12,
            "max |arg lambda + asin eps| = " + fmt(worst) + " (oracle " + fmt(worst_oracle) + ", tol 1e-9); |E l - pi/2| = " +
                fmt(edge) + " (tol 1e-12)"};
}

sampled_wave sample(const std::function<cvec(double)>& f, std::int64_t W)
{
    std::vector<cvec> s;
    for (std::int64_t n = -W; n <= W; ++n)
        s.push_back(f(static_cast<double>(n)));
    return {1.0, -W, std::move(s)};
}

// 5. Reconstruction.
outcome reconstruction()
{
    std::mt19937_64 rng(1005);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<cvec> s;
    for (int k = 0; k < 101; ++k)
    {
        cvec v(2);
        v << cplx(u(rng), u(rng)), cplx(u(rng), u(rng));
        s.push_back(v);
    }
    const sampled_wave grid(0.5, -50, s);
    double grid_err = 0.0;
    for (std::int64_t n = -50; n <= 50; ++n)
        grid_err = std::max(grid_err, (grid(0.5 * static_cast<double>(n)) - grid.sample(n)).norm() / grid.sample(n).norm());

    std::vector<double> trunc;
    bool monotone = true;
    for (std::int64_t W : {50, 100, 200, 400})
    {
        const auto w = sample([](double) { return cvec::Constant(1, cplx(1.0)); }, W);
        trunc.push_back(std::abs(w(0.37)(0) - 1.0));
        if (trunc.size() > 1 && trunc.back() > 1.1 * trunc[trunc.size() - 2])
            monotone = false;
    }

    const auto spec = make_spec(test::imat({{1}}), test::imat({{0}}), 2);
    const StatePair seed{Slice{0, test::ivec({1}), test::ivec({0}), BigInt(0), BigInt(0)},
                         Slice{1, test::ivec({0}), test::ivec({-1}), BigInt(1), BigInt(0)}};
    const auto orbit = sampled_wave::from_trajectory(evolve_around(spec, seed, 1000, 999), 1.0);
    double worst = 0.0;
    for (int k = 1; k <= 9; ++k)
        worst = std::max(worst, sinh_residual(orbit, cmat::Identity(1, 1), 0.1 * k));

    std::string tr;
    for (double e : trunc)
        tr += (tr.empty() ? "" : " ") + fmt(e);
    return {grid_err <= 1e-15 && monotone && worst <= 1e-3,
            "grid error " + fmt(grid_err) + " (tol 1e-15); all-ones truncation at W=50,100,200,400: " + tr +
                "; period-4 sinh residual max " + fmt(worst) + " over t=0.1..0.9, window 1000 (tol 1e-3)"};
}

// 6. Continuum conservation and two-time correlations.
outcome continuum_laws()
{
    cvec psi0(2);
    psi0 << cplx(0.8, 0.1), cplx(-0.3, 0.5);
    const auto analytic = modal_wave::from_hamiltonian(pauli_x(), psi0, 1.0);
    double analytic_worst = 0.0;
    for (double t : {-2.5, -0.7, 0.0, 0.31, 1.9, 4.9})
        analytic_worst = std::max(analytic_worst, std::abs(continuum_conservation_residual(analytic, pauli_x(), t)));

    const auto rec = sample([&](double t) { return analytic(t); }, 1000);
    double rec_worst = 0.0;
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9})
        rec_worst = std::max(rec_worst, std::abs(continuum_conservation_residual(rec, pauli_x(), t)));

    double shift_worst = 0.0;
    for (int k = 0; k < 20; ++k)
    {
        const double t = -4.0 + 0.43 * k;
        shift_worst = std::max(shift_worst, std::abs(two_time(analytic, pauli_x(), t - 1.0, t) -
                                                     two_time(analytic, pauli_x(), t, t + 1.0)));
    }

    double cos_worst = 0.0;
    std::vector<double> gap;
    for (double e : {0.5, 0.25, 0.125})
    {
        const auto w = modal_wave::from_hamiltonian(cmat::Constant(1, 1, e), cvec::Ones(1), 1.0);
        const double c = two_time(w, cmat::Identity(1, 1), 0.2, 1.2);
        cos_worst = std::max(cos_worst, std::abs(c - std::cos(std::asin(e))));
        gap.push_back(std::abs(c - 1.0));
    }
    bool fourfold = true;
    std::string ratios;
    for (std::size_t k = 1; k < gap.size(); ++k)
    {
        const double r = gap[k - 1] / gap[k];
        fourfold = fourfold && r >= 3.5 && r <= 4.5;
        ratios += (ratios.empty() ? "" : ", ") + fmt(r);
    }
    return {analytic_worst <= 1e-9 && rec_worst <= 1e-3 && shift_worst <= 1e-6 && cos_worst <= 1e-9 && fourfold,
            "analytic residual " + fmt(analytic_worst) + " (tol 1e-9); reconstructed " + fmt(rec_worst) +
                " (tol 1e-3); translation " + fmt(shift_worst) + " (tol 1e-6); |C_1 - cos El| " + fmt(cos_worst) +
                " (tol 1e-9); 1 - C_1 ratios " + ratios + " (want 3.5..4.5)"};
}

// 7. Quantization error scaling.
outcome quantization_scaling()
{
    const cmat h = random_hermitian(4, 7);
    std::vector<std::int64_t> Ms{4, 8, 16, 32};
    const auto t = convergence_study(h, Ms);
    bool bounded = true;
    std::string errs;
    for (std::size_t k = 0; k < Ms.size(); ++k)
    {
        const double M = static_cast<double>(Ms[k]);
        double direct = 0.0;
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < h.cols(); ++j)
            {
                direct = std::max(direct, std::abs(std::round(M * h(i, j).real()) / M - h(i, j).real()));
                direct = std::max(direct, std::abs(std::round(M * h(i, j).imag()) / M - h(i, j).imag()));
            }
        bounded = bounded && direct <= 0.5 / M && std::abs(direct - t.rows[k].elem_err_raw) <= 1e-15;
        errs += (errs.empty() ? "" : " ") + fmt(t.rows[k].elem_err_raw);
    }
    const bool slope_ok = t.slope && *t.slope >= -1.3 && *t.slope <= -0.7;
    return {bounded && slope_ok, "random h (N=4, seed 7), errors at M=4,8,16,32: " + errs + " (each <= 1/(2M)); slope " +
                                     (t.slope ? fmt(*t.slope) : std::string("none")) + " (want -1.3..-0.7)"};
}

// 8. Band diagnostics and refusal.
outcome band_diagnostics()
{
    GaussianMatrix H(2, 2);
    H(0, 1) = GaussianInteger(3);
    H(1, 0) = GaussianInteger(3);
    const auto rep = band_report(H, 2);
    const double growth_err = std::abs(rep.max_growth() - (3.0 + 2.0 * std::sqrt(2.0)));

    const auto dir = std::filesystem::temp_directory_path() / ("hamca-acceptance-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "pauli3.json";
    std::ofstream(cfg) << R"({"h": [[0, 3], [3, 0]], "M": 1, "psi0": [1, 0]})";
    const std::string cmd = std::string(HAMCA_CLI_PATH) + " map-qm --config " + cfg.string() + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    const int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::filesystem::remove_all(dir);

    return {rep.all_out_of_band() && growth_err <= 1e-9 && code == 7,
            std::string(rep.all_out_of_band() ? "all modes out of band" : "NOT all out of band") + ", growth error " +
                fmt(growth_err) + " (tol 1e-9); map-qm exit code " + std::to_string(code) + " (want 7)"};
}

// 9. Modified Leibniz identity.
outcome leibniz()
{
    std::mt19937_64 rng(1009);
    std::size_t nonzero = 0;
    std::size_t checks = 0;
    for (int run = 0; run < 1000; ++run)
    {
        std::vector<BigInt> O, Op;
        for (int i = 0; i < 20; ++i)
        {
            O.push_back(test::random_digits(rng, 1 + rng() % 30));
            Op.push_back(test::random_digits(rng, 1 + rng() % 30));
        }
        for (std::size_t n = 1; n + 1 < O.size(); ++n)
        {
            nonzero += leibniz_defect<BigInt>(O, Op, n) != 0 ? 1 : 0;
            ++checks;
        }
    }
    return {nonzero == 0, std::to_string(checks) + " checks over 1000 sequence pairs, " + std::to_string(nonzero) +
                              " nonzero"};
}

struct criterion
{
    int id;
    const char* name;
    double limit_s;
    outcome (*run)();
};

} // namespace

int main()
{
    const criterion criteria[] = {
        {1, "exact conservation", 60.0, exact_conservation},
        {2, "reversibility", 10.0, reversibility},
        {3, "action principle", 30.0, action_principle},
        {4, "dispersion", 1.0, dispersion},
        {5, "reconstruction", 5.0, reconstruction},
        {6, "continuum conservation", 5.0, continuum_laws},
        {7, "quantization scaling", 1.0, quantization_scaling},
        {8, "band diagnostics", 1.0, band_diagnostics},
        {9, "Leibniz identity", 1.0, leibniz},
    };
    int failed = 0;
    for (const auto& c : criteria)
    {
        stopwatch sw;
        outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double t = sw.seconds();
        const bool in_time = t <= c.limit_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << "; "
                  << fmt(t) << " s (limit " << fmt(c.limit_s) << " s" << (in_time ? "" : ", EXCEEDED") << ")"
                  << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
