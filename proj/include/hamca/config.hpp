#pragma once

// JSON run and problem configurations for the command-line tool.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamca/automaton.hpp"
#include "hamca/continuum.hpp"
#include "hamca/error.hpp"
#include "hamca/exactmath.hpp"
#include "hamca/qmbridge.hpp"

namespace hamca
{

/// The document is not valid JSON.
class config_syntax_error : public error
{
public:
    using error::error;
};

/// The document is valid JSON but violates the schema; `field()` is the
/// path of the offending field.
class config_semantic_error : public error
{
public:
    config_semantic_error(std::string field, const std::string& what)
        : error("field \"" + field + "\": " + what), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct run_config
{
    AutomatonSpec spec;
    StatePair seed;
    std::size_t steps = 0;
    double scale_l = 1.0;
    std::optional<std::size_t> budget;
    std::optional<std::size_t> window;
    std::optional<std::string> out_path;
    std::string format = "csv";
};

struct problem_config
{
    cmat h;
    double eps_phys = 1.0;
    std::int64_t M = 1;
    std::int64_t M_prime = 1000;
    std::vector<std::int64_t> M_values;
    std::optional<cvec> psi0;
    std::int64_t Q = 1000;
    std::size_t steps = 100;
    std::size_t pad = 200;
    std::vector<double> times;

    physical_problem problem() const { return {h, eps_phys, M, M_prime}; }
};

namespace detail
{

using nlohmann::json;

inline json parse_json(const std::string& text)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw config_syntax_error(std::string("invalid JSON: ") + e.what());
    }
}

inline BigInt json_to_bigint(const json& v, const std::string& field)
{
    if (v.is_number_integer())
        return v.is_number_unsigned() ? BigInt(std::to_string(v.get<std::uint64_t>()))
                                      : BigInt(static_cast<long>(v.get<std::int64_t>()));
    if (v.is_string())
    {
        try
        {
            return parse_bigint(v.get<std::string>());
        }
        catch (const range_error& e)
        {
            throw config_semantic_error(field, e.what());
        }
    }
    throw config_semantic_error(field, "expected an integer");
}

inline std::int64_t json_to_int64(const json& v, const std::string& field)
{
    const BigInt b = json_to_bigint(v, field);
    if (!b.fits_slong_p())
        throw config_semantic_error(field, "integer out of range");
    return b.get_si();
}

inline std::size_t json_to_count(const json& v, const std::string& field)
{
    const auto k = json_to_int64(v, field);
    if (k < 0)
        throw config_semantic_error(field, "must be non-negative");
    return static_cast<std::size_t>(k);
}

inline double json_to_double(const json& v, const std::string& field)
{
    if (!v.is_number())
        throw config_semantic_error(field, "expected a number");
    return v.get<double>();
}

inline std::vector<BigInt> json_to_int_vector(const json& v, const std::string& field, std::size_t dim)
{
    if (!v.is_array())
        throw config_semantic_error(field, "expected an array");
    if (v.size() != dim)
        throw config_semantic_error(field, "expected " + std::to_string(dim) + " entries, got " +
                                               std::to_string(v.size()));
    std::vector<BigInt> r;
    for (std::size_t k = 0; k < v.size(); ++k)
        r.push_back(json_to_bigint(v[k], field + "[" + std::to_string(k) + "]"));
    return r;
}

inline IntMatrix json_to_int_matrix(const json& v, const std::string& field)
{
    if (!v.is_array() || v.empty())
        throw config_semantic_error(field, "expected a non-empty array of rows");
    const std::size_t n = v.size();
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::string row_field = field + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != n)
            throw config_semantic_error(field, "must be a square matrix");
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = json_to_bigint(v[i][j], row_field + "[" + std::to_string(j) + "]");
    }
    return m;
}

inline cmat json_to_real_matrix(const json& v, const std::string& field)
{
    if (!v.is_array() || v.empty())
        throw config_semantic_error(field, "expected a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(v.size());
    cmat m = cmat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw config_semantic_error(field, "must be a square matrix");
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = json_to_double(row[static_cast<std::size_t>(j)], field);
    }
    return m;
}

/// Either a real matrix or {"re": [...], "im": [...]}.
inline cmat json_to_complex_matrix(const json& v, const std::string& field)
{
    if (v.is_object())
    {
        if (!v.contains("re"))
            throw config_semantic_error(field + ".re", "missing");
        cmat m = json_to_real_matrix(v["re"], field + ".re");
        if (v.contains("im"))
        {
            const cmat im = json_to_real_matrix(v["im"], field + ".im");
            if (im.rows() != m.rows())
                throw config_semantic_error(field + ".im", "shape differs from re");
            m += cplx(0.0, 1.0) * im;
        }
        return m;
    }
    return json_to_real_matrix(v, field);
}

inline cvec json_to_complex_vector(const json& v, const std::string& field)
{
    auto real_vec = [&](const json& a, const std::string& f) {
        if (!a.is_array() || a.empty())
            throw config_semantic_error(f, "expected a non-empty array");
        cvec r(static_cast<Eigen::Index>(a.size()));
        for (std::size_t k = 0; k < a.size(); ++k)
            r(static_cast<Eigen::Index>(k)) = json_to_double(a[k], f);
        return r;
    };
    if (v.is_object())
    {
        if (!v.contains("re"))
            throw config_semantic_error(field + ".re", "missing");
        cvec r = real_vec(v["re"], field + ".re");
        if (v.contains("im"))
        {
            const cvec im = real_vec(v["im"], field + ".im");
            if (im.size() != r.size())
                throw config_semantic_error(field + ".im", "length differs from re");
            r += cplx(0.0, 1.0) * im;
        }
        return r;
    }
    return real_vec(v, field);
}

inline void check_symmetry(const IntMatrix& M, const std::string& field, bool anti)
{
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = i; j < M.cols(); ++j)
            if (anti ? !(M(i, j) == -M(j, i)) : !(M(i, j) == M(j, i)))
                throw config_semantic_error(field, std::string(anti ? "not antisymmetric" : "not symmetric") +
                                                       " at (" + std::to_string(i) + ", " + std::to_string(j) +
                                                       ")");
}

} // namespace detail

/// Parses and validates a run configuration.
///
/// Required: "S", "c", "x0", "p0", "x1", "p1". Optional: "dim" (must match
/// S), "A" (zero), "tau0" (0), "two_pi0" (0), "tau1" (tau0 + floor(c/2)),
/// "two_pi1" (two_pi0 + 2H_1 - 2H_0), "steps" (0), "scale_l" (1), "budget",
/// "window", "output": {"path", "format"}. Integers may be JSON numbers or
/// decimal strings.
inline run_config parse_config(const std::string& text)
{
    using detail::json;
    const json doc = detail::parse_json(text);
    if (!doc.is_object())
        throw config_semantic_error("", "configuration must be a JSON object");

    auto require = [&](const char* key) -> const json& {
        if (!doc.contains(key))
            throw config_semantic_error(key, "missing");
        return doc[key];
    };

    run_config cfg;
    IntMatrix S = detail::json_to_int_matrix(require("S"), "S");
    const std::size_t n = S.rows();
    if (doc.contains("dim") && detail::json_to_count(doc["dim"], "dim") != n)
        throw config_semantic_error("dim", "does not match the size of S");
    detail::check_symmetry(S, "S", false);

    IntMatrix A(n, n);
    if (doc.contains("A"))
    {
        A = detail::json_to_int_matrix(doc["A"], "A");
        if (A.rows() != n)
            throw config_semantic_error("A", "size differs from S");
        detail::check_symmetry(A, "A", true);
    }

    const std::int64_t c = detail::json_to_int64(require("c"), "c");
    cfg.spec = AutomatonSpec{n, {std::move(S), std::move(A)}, c};

    Slice s0{0, detail::json_to_int_vector(require("x0"), "x0", n), detail::json_to_int_vector(require("p0"), "p0", n),
             doc.contains("tau0") ? detail::json_to_bigint(doc["tau0"], "tau0") : BigInt(0),
             doc.contains("two_pi0") ? detail::json_to_bigint(doc["two_pi0"], "two_pi0") : BigInt(0)};
    Slice s1{1, detail::json_to_int_vector(require("x1"), "x1", n), detail::json_to_int_vector(require("p1"), "p1", n),
             BigInt(0), BigInt(0)};
    // floor division keeps tau_n = tau0 + n for the usual c = 2
    const BigInt half_c = BigInt(static_cast<long>(c >= 0 ? c / 2 : -((-c + 1) / 2)));
    s1.tau = doc.contains("tau1") ? detail::json_to_bigint(doc["tau1"], "tau1") : BigInt(s0.tau + half_c);
    s1.two_pi = doc.contains("two_pi1")
                    ? detail::json_to_bigint(doc["two_pi1"], "two_pi1")
                    : BigInt(s0.two_pi + hamiltonian_doubled(cfg.spec, s1) - hamiltonian_doubled(cfg.spec, s0));
    cfg.seed = {std::move(s0), std::move(s1)};

    if (doc.contains("steps"))
        cfg.steps = detail::json_to_count(doc["steps"], "steps");
    if (doc.contains("scale_l"))
    {
        cfg.scale_l = detail::json_to_double(doc["scale_l"], "scale_l");
        if (!(cfg.scale_l > 0.0))
            throw config_semantic_error("scale_l", "must be positive");
    }
    if (doc.contains("budget"))
        cfg.budget = detail::json_to_count(doc["budget"], "budget");
    if (doc.contains("window"))
        cfg.window = detail::json_to_count(doc["window"], "window");
    if (doc.contains("output"))
    {
        const auto& o = doc["output"];
        if (!o.is_object())
            throw config_semantic_error("output", "expected an object");
        if (o.contains("path"))
        {
            if (!o["path"].is_string())
                throw config_semantic_error("output.path", "expected a string");
            cfg.out_path = o["path"].get<std::string>();
        }
        if (o.contains("format"))
        {
            if (!o["format"].is_string())
                throw config_semantic_error("output.format", "expected a string");
            cfg.format = o["format"].get<std::string>();
            if (cfg.format != "csv" && cfg.format != "json")
                throw config_semantic_error("output.format", "must be \"csv\" or \"json\"");
        }
    }
    return cfg;
}

/// Parses a problem configuration for map-qm and convergence.
///
/// "h" (real matrix or {"re", "im"}) or "random_h": {"dim", "seed"}; optional
/// "eps_phys", "M", "M_prime", "M_values", "psi0", "Q", "steps", "pad", "times".
inline problem_config parse_problem_config(const std::string& text)
{
    using detail::json;
    const json doc = detail::parse_json(text);
    if (!doc.is_object())
        throw config_semantic_error("", "configuration must be a JSON object");

    problem_config cfg;
    if (doc.contains("h"))
        cfg.h = detail::json_to_complex_matrix(doc["h"], "h");
    else if (doc.contains("random_h"))
    {
        const auto& r = doc["random_h"];
        if (!r.is_object() || !r.contains("dim") || !r.contains("seed"))
            throw config_semantic_error("random_h", "expected {\"dim\", \"seed\"}");
        const auto dim = detail::json_to_count(r["dim"], "random_h.dim");
        if (dim == 0)
            throw config_semantic_error("random_h.dim", "must be positive");
        cfg.h = random_hermitian(dim, static_cast<std::uint64_t>(detail::json_to_int64(r["seed"], "random_h.seed")));
    }
    else
        throw config_semantic_error("h", "missing");
    if (!is_hermitian(cfg.h))
        throw config_semantic_error("h", "not Hermitian");

    if (doc.contains("eps_phys"))
        cfg.eps_phys = detail::json_to_double(doc["eps_phys"], "eps_phys");
    if (!(cfg.eps_phys > 0.0))
        throw config_semantic_error("eps_phys", "must be positive");
    if (doc.contains("M"))
        cfg.M = detail::json_to_int64(doc["M"], "M");
    if (cfg.M < 1)
        throw config_semantic_error("M", "must be at least 1");
    cfg.M_prime = doc.contains("M_prime") ? detail::json_to_int64(doc["M_prime"], "M_prime") : 1000 * cfg.M;
    if (cfg.M_prime <= cfg.M)
        throw config_semantic_error("M_prime", "must exceed M");
    if (doc.contains("M_values"))
    {
        const auto& mv = doc["M_values"];
        if (!mv.is_array())
            throw config_semantic_error("M_values", "expected an array");
        for (std::size_t k = 0; k < mv.size(); ++k)
        {
            const auto m = detail::json_to_int64(mv[k], "M_values[" + std::to_string(k) + "]");
            if (m < 1)
                throw config_semantic_error("M_values", "entries must be at least 1");
            cfg.M_values.push_back(m);
        }
    }
    if (doc.contains("psi0"))
    {
        cfg.psi0 = detail::json_to_complex_vector(doc["psi0"], "psi0");
        if (cfg.psi0->size() != cfg.h.rows())
            throw config_semantic_error("psi0", "length differs from h");
    }
    if (doc.contains("Q"))
        cfg.Q = detail::json_to_int64(doc["Q"], "Q");
    if (cfg.Q < 1)
        throw config_semantic_error("Q", "must be positive");
    if (doc.contains("steps"))
        cfg.steps = detail::json_to_count(doc["steps"], "steps");
    if (doc.contains("pad"))
        cfg.pad = detail::json_to_count(doc["pad"], "pad");
    if (doc.contains("times"))
    {
        const auto& t = doc["times"];
        if (!t.is_array())
            throw config_semantic_error("times", "expected an array");
        for (const auto& v : t)
            cfg.times.push_back(detail::json_to_double(v, "times"));
    }
    return cfg;
}

} // namespace hamca
