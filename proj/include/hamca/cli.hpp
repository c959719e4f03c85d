#pragma once

// Command dispatch for the `hamca` batch tool.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hamca/automaton.hpp"
#include "hamca/config.hpp"
#include "hamca/continuum.hpp"
#include "hamca/error.hpp"
#include "hamca/io.hpp"
#include "hamca/qmbridge.hpp"
#include "hamca/verify.hpp"

namespace hamca
{

inline constexpr const char* version = "1.0.0";

namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int syntax = 2;
inline constexpr int semantic = 3;
inline constexpr int budget = 4;
inline constexpr int verify_failed = 5;
inline constexpr int bridge_precondition = 6;
inline constexpr int band_refusal = 7;
} // namespace exit_code

inline constexpr std::size_t default_window = 1000;

/// Bad command-line usage or unreadable input file.
class usage_error : public error
{
public:
    using error::error;
};

/// Parses "start:stop:count" (inclusive linspace) or "a,b,c".
inline std::vector<double> parse_time_grid(const std::string& spec)
{
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(s, &used);
        }
        catch (const std::exception&)
        {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v))
            throw usage_error("invalid number '" + s + "' in --t-grid");
        return v;
    };
    std::vector<std::string> parts;
    const char sep = spec.find(':') != std::string::npos ? ':' : ',';
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, sep))
        parts.push_back(item);
    if (spec.empty() || parts.empty())
        throw usage_error("empty --t-grid");

    std::vector<double> grid;
    if (sep == ':')
    {
        if (parts.size() != 3)
            throw usage_error("--t-grid range must be start:stop:count");
        const double a = number(parts[0]);
        const double b = number(parts[1]);
        const double k = number(parts[2]);
        if (k < 1 || k != std::floor(k) || k > 1e6)
            throw usage_error("--t-grid count must be a positive integer");
        const auto count = static_cast<std::size_t>(k);
        for (std::size_t i = 0; i < count; ++i)
            grid.push_back(count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    else
        for (const auto& p : parts)
            grid.push_back(number(p));
    return grid;
}

namespace detail
{

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw usage_error("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

struct cli_options
{
    std::string config;
    std::string out;
    std::string t_grid = "0.1:0.9:9";
    std::optional<std::size_t> budget;
    std::optional<std::size_t> window;
    std::string trajectory;
    std::string format;
};

/// Writes to --out (plus a PATH.meta.json sidecar) or to the stream.
inline void emit(const std::string& content, const std::string& out_path, const std::string& verb,
                 const cli_options& opts, std::ostream& out)
{
    if (out_path.empty())
    {
        out << content;
        return;
    }
    {
        std::ofstream f(out_path, std::ios::binary);
        if (!f || !(f << content))
            throw error("cannot write '" + out_path + "'");
    }
    nlohmann::json meta{{"tool", "hamca"},
                        {"version", version},
                        {"command", verb},
                        {"config", opts.config},
                        {"created_utc", utc_timestamp()}};
    std::ofstream m(out_path + ".meta.json", std::ios::binary);
    if (!m || !(m << meta.dump(2) << '\n'))
        throw error("cannot write '" + out_path + ".meta.json'");
}

inline evolve_options evolve_opts(const run_config& cfg, const cli_options& opts)
{
    evolve_options e;
    if (opts.budget)
        e.digit_budget = *opts.budget;
    else if (cfg.budget)
        e.digit_budget = *cfg.budget;
    return e;
}

/// Warnings about seed weight on unstable modes and on marginal modes
/// seeded off their double root.
inline std::vector<std::string> seed_diagnostics(const run_config& cfg)
{
    std::vector<std::string> notes;
    cmat H;
    cvec a;
    cvec b;
    try
    {
        H = to_complex(cfg.spec.hamiltonian());
        a = to_complex(cfg.seed.prev);
        b = to_complex(cfg.seed.curr);
    }
    catch (const precision_error&)
    {
        return notes;
    }
    const auto spec = spectrum(H, 1.0);
    const double scale = 1.0 + a.norm() + b.norm();
    for (std::size_t k = 0; k < spec.modes.size(); ++k)
    {
        const auto& m = spec.modes[k];
        const cplx ca = m.eigvec.dot(a);
        const cplx cb = m.eigvec.dot(b);
        if (std::abs(ca) + std::abs(cb) <= 1e-9 * scale)
            continue;
        const auto ph = step_eigenphase(m.epsilon, cfg.spec.lapse_c);
        if (ph.kind == stability::unstable)
            notes.push_back("warning: mode " + std::to_string(k) + " (eps = " + format_double(m.epsilon) +
                            ") is out of band; growth factor " + format_double(ph.growth()) + " per slice");
        else if (ph.kind == stability::marginal && std::abs(cb - ph.roots.first * ca) > 1e-9 * scale)
            notes.push_back("warning: marginal mode " + std::to_string(k) + " (eps = " + format_double(m.epsilon) +
                            ") is seeded off its double root and grows linearly in n");
    }
    return notes;
}

inline std::string growth_diagnostic(const run_config& cfg)
{
    try
    {
        const auto bands = band_report(cfg.spec.hamiltonian(), cfg.spec.lapse_c);
        std::string s = "growth diagnostic: largest step multiplier modulus " + format_double(bands.max_growth());
        for (std::size_t k = 0; k < bands.modes.size(); ++k)
            s += "\n  mode " + std::to_string(k) + ": eps = " + format_double(bands.modes[k].epsilon) + ", " +
                 to_string(bands.modes[k].kind) + ", growth " + format_double(bands.modes[k].growth);
        return s;
    }
    catch (const error&)
    {
        return "growth diagnostic unavailable";
    }
}

inline int cmd_run(const cli_options& opts, std::ostream& out, std::ostream& err)
{
    const auto cfg = parse_config(read_file(opts.config));
    for (const auto& w : seed_diagnostics(cfg))
        err << w << '\n';
    Trajectory traj;
    try
    {
        traj = evolve(cfg.spec, cfg.seed, cfg.steps, evolve_opts(cfg, opts));
    }
    catch (const budget_exceeded& e)
    {
        err << "error: " << e.what() << '\n' << growth_diagnostic(cfg) << '\n';
        return exit_code::budget;
    }
    const std::string format = opts.format.empty() ? cfg.format : opts.format;
    std::ostringstream os;
    if (format == "json")
        write_trajectory_json(os, traj);
    else
        write_trajectory_csv(os, traj);
    emit(os.str(), opts.out.empty() ? cfg.out_path.value_or("") : opts.out, "run", opts, out);
    return exit_code::ok;
}

inline int cmd_verify(const cli_options& opts, std::ostream& out, std::ostream& err)
{
    const auto cfg = parse_config(read_file(opts.config));
    verify_options vopts;
    std::vector<check_result> extra;
    Trajectory traj;
    if (!opts.trajectory.empty())
    {
        std::istringstream in(read_file(opts.trajectory));
        trajectory_records rec;
        try
        {
            rec = read_trajectory_csv(in, cfg.spec.dim);
        }
        catch (const range_error& e)
        {
            throw usage_error(opts.trajectory + ": " + e.what());
        }
        if (rec.slices.size() < 2)
            throw usage_error(opts.trajectory + ": needs at least two slices");
        const bool seed_ok = rec.slices[0] == cfg.seed.prev && rec.slices[1] == cfg.seed.curr;
        extra.push_back({"seed_match", seed_ok, seed_ok ? "" : "file seed slices differ from the configured seed"});
        // configured seed followed by the file's continuation
        traj.spec = cfg.spec;
        traj.slices = {cfg.seed.prev, cfg.seed.curr};
        traj.slices.insert(traj.slices.end(), rec.slices.begin() + 2, rec.slices.end());
        for (std::size_t k = 1; k < traj.size(); ++k)
            if (traj.slices[k].n != traj.slices[k - 1].n + 1)
                throw usage_error(opts.trajectory + ": slice indices are not consecutive after the seed");
        std::vector<BigInt> recorded = rec.two_H;
        recorded[0] = hamiltonian_doubled(cfg.spec, cfg.seed.prev);
        recorded[1] = hamiltonian_doubled(cfg.spec, cfg.seed.curr);
        vopts.recorded_two_H = std::move(recorded);
    }
    else
    {
        try
        {
            traj = evolve(cfg.spec, cfg.seed, cfg.steps, evolve_opts(cfg, opts));
        }
        catch (const budget_exceeded& e)
        {
            err << "error: " << e.what() << '\n' << growth_diagnostic(cfg) << '\n';
            return exit_code::budget;
        }
    }

    auto rep = verify_trajectory(traj, vopts);
    rep.checks.insert(rep.checks.begin(), extra.begin(), extra.end());
    std::ostringstream os;
    if (opts.format == "json")
    {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& c : rep.checks)
            j.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        os << nlohmann::json{{"slices", traj.size()}, {"all_pass", rep.all_pass()}, {"checks", j}}.dump(2) << '\n';
    }
    else
        for (const auto& c : rep.checks)
            os << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
    emit(os.str(), opts.out, "verify", opts, out);
    return rep.all_pass() ? exit_code::ok : exit_code::verify_failed;
}

inline int cmd_spectrum(const cli_options& opts, std::ostream& out, std::ostream&)
{
    const auto cfg = parse_config(read_file(opts.config));
    const auto spec = spectrum(to_complex(cfg.spec.hamiltonian()), cfg.scale_l);
    std::ostringstream os;
    if (opts.format == "json")
    {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t k = 0; k < spec.modes.size(); ++k)
        {
            const auto& m = spec.modes[k];
            const auto ph = step_eigenphase(m.epsilon, cfg.spec.lapse_c);
            nlohmann::json r{{"mode", k}, {"epsilon", m.epsilon}, {"stability", to_string(ph.kind)},
                             {"growth", ph.growth()}};
            r["E"] = m.energy ? nlohmann::json(*m.energy) : nlohmann::json("OUT_OF_BAND");
            rows.push_back(r);
        }
        os << nlohmann::json{{"scale_l", cfg.scale_l}, {"c", cfg.spec.lapse_c}, {"modes", rows}}.dump(2) << '\n';
    }
    else
    {
        os << "mode,epsilon,E,E_l,stability,growth\n";
        for (std::size_t k = 0; k < spec.modes.size(); ++k)
        {
            const auto& m = spec.modes[k];
            const auto ph = step_eigenphase(m.epsilon, cfg.spec.lapse_c);
            os << k << ',' << format_double(m.epsilon) << ','
               << (m.energy ? format_double(*m.energy) : std::string("OUT_OF_BAND")) << ','
               << (m.energy ? format_double(*m.energy * cfg.scale_l) : std::string("OUT_OF_BAND")) << ','
               << to_string(ph.kind) << ',' << format_double(ph.growth()) << '\n';
        }
    }
    emit(os.str(), opts.out, "spectrum", opts, out);
    return exit_code::ok;
}

inline int cmd_reconstruct(const cli_options& opts, std::ostream& out, std::ostream& err)
{
    const auto cfg = parse_config(read_file(opts.config));
    if (cfg.spec.lapse_c != 2)
        throw precondition_error("reconstruction requires c = 2, config has c = " +
                                 std::to_string(cfg.spec.lapse_c));
    const auto grid = parse_time_grid(opts.t_grid);
    const std::size_t W = opts.window.value_or(cfg.window.value_or(default_window));
    if (W < 1)
        throw usage_error("--window must be at least 1");
    for (const auto& w : seed_diagnostics(cfg))
        err << w << '\n';

    Trajectory traj;
    try
    {
        traj = evolve_around(cfg.spec, cfg.seed, W, W - 1, evolve_opts(cfg, opts));
    }
    catch (const budget_exceeded& e)
    {
        err << "error: " << e.what() << '\n' << growth_diagnostic(cfg) << '\n';
        return exit_code::budget;
    }
    const double l = cfg.scale_l;
    const auto wave = sampled_wave::from_trajectory(traj, l);
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    wave.require_inside((*lo - 1.0) * l, (*hi + 1.0) * l);
    const cmat H = to_complex(cfg.spec.hamiltonian());

    std::ostringstream os;
    os << 't';
    for (std::size_t a = 0; a < cfg.spec.dim; ++a)
        os << ",re_psi" << a << ",im_psi" << a;
    os << ",sinh_residual\n";
    for (double u : grid)
    {
        const cvec psi = wave(u * l);
        os << format_double(u);
        for (Eigen::Index a = 0; a < psi.size(); ++a)
            os << ',' << format_double(psi(a).real()) << ',' << format_double(psi(a).imag());
        os << ',' << format_double(sinh_residual(wave, H, u * l)) << '\n';
    }
    emit(os.str(), opts.out, "reconstruct", opts, out);
    return exit_code::ok;
}

inline int cmd_map_qm(const cli_options& opts, std::ostream& out, std::ostream& err)
{
    const auto cfg = parse_problem_config(read_file(opts.config));
    const auto q = quantize(cfg.problem());
    if (q.in_band_modes.empty())
        throw band_error("every mode of H = round(M h) is out of band (spectral radius " +
                         format_double(q.spectral_radius) + "); the integer recursion would grow by up to " +
                         format_double(*std::max_element(q.growth_rates.begin(), q.growth_rates.end())) +
                         " per slice");
    if (!q.out_band_modes.empty())
        err << "warning: " << q.out_band_modes.size() << " of " << q.epsilons.size()
            << " modes are out of band and are discarded from the comparison\n";

    std::optional<comparison_report> cmp;
    if (cfg.psi0)
    {
        comparison_options copts;
        copts.times = cfg.times;
        copts.pad = cfg.pad;
        if (opts.budget)
            copts.evolve.digit_budget = *opts.budget;
        cmp = simulate_vs_exact(cfg.problem(), *cfg.psi0, cfg.Q, cfg.steps, copts);
        if (cmp->marginal_secular)
            err << "warning: a marginal mode is seeded off its double root and grows linearly in n\n";
    }

    const auto n = q.H_int.rows();
    std::ostringstream os;
    if (opts.format == "json")
    {
        nlohmann::json H = nlohmann::json::array();
        for (std::size_t i = 0; i < n; ++i)
        {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t j = 0; j < n; ++j)
                row.push_back({json_integer(q.H_int(i, j).re), json_integer(q.H_int(i, j).im)});
            H.push_back(row);
        }
        nlohmann::json modes = nlohmann::json::array();
        for (std::size_t k = 0; k < q.epsilons.size(); ++k)
            modes.push_back({{"mode", k},
                             {"epsilon", q.epsilons[k]},
                             {"stability", to_string(step_eigenphase(q.epsilons[k], 2).kind)},
                             {"growth", q.growth_rates[k]}});
        nlohmann::json j{{"M", cfg.M},
                         {"M_prime", cfg.M_prime},
                         {"eps_phys", cfg.eps_phys},
                         {"elem_err", q.elem_err},
                         {"elem_err_raw", q.elem_err_raw},
                         {"spectral_radius", q.spectral_radius},
                         {"H_int", H},
                         {"modes", modes}};
        if (cmp)
        {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& r : cmp->rows)
                rows.push_back({{"t", r.t},
                                {"physical_time", r.physical_time},
                                {"total", r.total},
                                {"hamiltonian_quantization", r.hamiltonian_quantization},
                                {"dispersion", r.dispersion},
                                {"discarded", r.discarded},
                                {"rounding", r.rounding},
                                {"truncation", r.truncation}});
            j["comparison"] = {{"Q", cmp->amplitude_Q},
                               {"steps", cmp->steps},
                               {"discarded_weight", cmp->discarded_weight},
                               {"dispersion_phase_rate", cmp->dispersion_phase_rate},
                               {"rows", rows}};
        }
        os << j.dump(2) << '\n';
    }
    else
    {
        os << "# quantization\nkey,value\n"
           << "M," << cfg.M << "\nM_prime," << cfg.M_prime << "\neps_phys," << format_double(cfg.eps_phys)
           << "\nelem_err," << format_double(q.elem_err) << "\nelem_err_raw," << format_double(q.elem_err_raw)
           << "\nspectral_radius," << format_double(q.spectral_radius) << "\nin_band_modes," << q.in_band_modes.size()
           << "\nout_band_modes," << q.out_band_modes.size() << '\n';
        os << "# H_int\nrow,col,re,im\n";
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                os << i << ',' << j << ',' << q.H_int(i, j).re << ',' << q.H_int(i, j).im << '\n';
        os << "# modes\nmode,epsilon,stability,growth\n";
        for (std::size_t k = 0; k < q.epsilons.size(); ++k)
            os << k << ',' << format_double(q.epsilons[k]) << ',' << to_string(step_eigenphase(q.epsilons[k], 2).kind)
               << ',' << format_double(q.growth_rates[k]) << '\n';
        if (cmp)
        {
            os << "# comparison\nkey,value\nQ," << cmp->amplitude_Q << "\nsteps," << cmp->steps
               << "\ndiscarded_weight," << format_double(cmp->discarded_weight) << "\ndispersion_phase_rate,"
               << format_double(cmp->dispersion_phase_rate) << '\n';
            os << "t,physical_time,total,hamiltonian_quantization,dispersion,discarded,rounding,truncation\n";
            for (const auto& r : cmp->rows)
                os << format_double(r.t) << ',' << format_double(r.physical_time) << ',' << format_double(r.total)
                   << ',' << format_double(r.hamiltonian_quantization) << ',' << format_double(r.dispersion) << ','
                   << format_double(r.discarded) << ',' << format_double(r.rounding) << ','
                   << format_double(r.truncation) << '\n';
        }
    }
    emit(os.str(), opts.out, "map-qm", opts, out);
    return exit_code::ok;
}

inline int cmd_convergence(const cli_options& opts, std::ostream& out, std::ostream& err)
{
    const auto cfg = parse_problem_config(read_file(opts.config));
    const auto Ms = cfg.M_values.empty() ? std::vector<std::int64_t>{4, 8, 16, 32} : cfg.M_values;
    convergence_table t;
    try
    {
        t = convergence_study(cfg.h, Ms);
    }
    catch (const precondition_error& e)
    {
        throw config_semantic_error("M_values", e.what());
    }
    if (t.exactly_representable)
        err << "note: h is exactly representable at every M; no slope to fit\n";

    std::ostringstream os;
    if (opts.format == "json")
    {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : t.rows)
            rows.push_back({{"M", r.M}, {"elem_err", r.elem_err}, {"elem_err_raw", r.elem_err_raw},
                            {"bound", 0.5 / static_cast<double>(r.M)}});
        nlohmann::json j{{"rows", rows}, {"exactly_representable", t.exactly_representable}};
        j["slope"] = t.slope ? nlohmann::json(*t.slope) : nlohmann::json(nullptr);
        os << j.dump(2) << '\n';
    }
    else
    {
        os << "M,elem_err,elem_err_raw,bound\n";
        for (const auto& r : t.rows)
            os << r.M << ',' << format_double(r.elem_err) << ',' << format_double(r.elem_err_raw) << ','
               << format_double(0.5 / static_cast<double>(r.M)) << '\n';
        os << "# slope," << (t.slope ? format_double(*t.slope) : std::string("none")) << '\n';
    }
    emit(os.str(), opts.out, "convergence", opts, out);
    return exit_code::ok;
}

} // namespace detail

/// Runs one command; returns the process exit code. Never throws.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Integer Hamiltonian cellular automaton toolkit", "hamca"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    detail::cli_options opts;
    auto add_common = [&](CLI::App* sub, bool formats) {
        sub->add_option("--config", opts.config, "JSON configuration file")->required();
        sub->add_option("--out", opts.out, "output file (default: standard output)");
        sub->add_option("--budget", opts.budget, "digit budget per slice entry");
        if (formats)
            sub->add_option("--format", opts.format, "output format")
                ->check(CLI::IsMember({"text", "csv", "json"}));
    };
    auto* run = app.add_subcommand("run", "evolve the configured seed pair and write the trajectory");
    add_common(run, true);
    auto* verify = app.add_subcommand("verify", "run the invariant suite on the configured trajectory");
    add_common(verify, true);
    verify->add_option("--trajectory", opts.trajectory, "precomputed trajectory CSV to check against the config");
    auto* spec = app.add_subcommand("spectrum", "eigenvalues, energies and stability of H");
    add_common(spec, true);
    auto* rec = app.add_subcommand("reconstruct", "sinc reconstruction and modified Schroedinger residual");
    add_common(rec, false);
    rec->add_option("--t-grid", opts.t_grid, "times in units of l: start:stop:count or a,b,c");
    rec->add_option("--window", opts.window, "half-width of the sample window in slices");
    auto* mapqm = app.add_subcommand("map-qm", "quantize h, check the band condition, compare with QM");
    add_common(mapqm, true);
    auto* conv = app.add_subcommand("convergence", "quantization error against M and its log-log slope");
    add_common(conv, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return exit_code::ok;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    }
    catch (const CLI::CallForVersion&)
    {
        out << version << '\n';
        return exit_code::ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::syntax;
    }

    try
    {
        if (run->parsed())
            return detail::cmd_run(opts, out, err);
        if (verify->parsed())
            return detail::cmd_verify(opts, out, err);
        if (spec->parsed())
            return detail::cmd_spectrum(opts, out, err);
        if (rec->parsed())
            return detail::cmd_reconstruct(opts, out, err);
        if (mapqm->parsed())
            return detail::cmd_map_qm(opts, out, err);
        return detail::cmd_convergence(opts, out, err);
    }
    catch (const usage_error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::syntax;
    }
    catch (const config_syntax_error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::syntax;
    }
    catch (const config_semantic_error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::semantic;
    }
    catch (const budget_exceeded& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::budget;
    }
    catch (const precondition_error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::bridge_precondition;
    }
    catch (const precision_error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::bridge_precondition;
    }
    catch (const band_error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::band_refusal;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::semantic;
    }
}

} // namespace hamca
