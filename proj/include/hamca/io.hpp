#pragma once

// Trajectory CSV/JSON serialization and deterministic number formatting.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hamca/automaton.hpp"
#include "hamca/error.hpp"
#include "hamca/integer.hpp"

namespace hamca
{

/// Decimal text that round-trips to the same double.
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// JSON number when it fits in 15 digits, decimal string otherwise.
inline nlohmann::json json_integer(const BigInt& v)
{
    const std::string s = v.get_str();
    const std::size_t digits = s.size() - (s.front() == '-' ? 1 : 0);
    if (digits <= 15)
        return v.get_si();
    return s;
}

inline std::string trajectory_csv_header(std::size_t dim)
{
    std::string h = "n,tau,two_pi,two_H";
    for (std::size_t a = 0; a < dim; ++a)
        h += ",x" + std::to_string(a);
    for (std::size_t a = 0; a < dim; ++a)
        h += ",p" + std::to_string(a);
    return h;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    os << trajectory_csv_header(traj.spec.dim) << '\n';
    for (const auto& s : traj.slices)
    {
        os << s.n << ',' << s.tau << ',' << s.two_pi << ',' << hamiltonian_doubled(traj.spec, s);
        for (const auto& v : s.x)
            os << ',' << v;
        for (const auto& v : s.p)
            os << ',' << v;
        os << '\n';
    }
}

inline void write_trajectory_json(std::ostream& os, const Trajectory& traj)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : traj.slices)
    {
        nlohmann::json r;
        r["n"] = s.n;
        r["tau"] = json_integer(s.tau);
        r["two_pi"] = json_integer(s.two_pi);
        r["two_H"] = json_integer(hamiltonian_doubled(traj.spec, s));
        r["x"] = nlohmann::json::array();
        r["p"] = nlohmann::json::array();
        for (const auto& v : s.x)
            r["x"].push_back(json_integer(v));
        for (const auto& v : s.p)
            r["p"].push_back(json_integer(v));
        rows.push_back(std::move(r));
    }
    os << nlohmann::json{{"dim", traj.spec.dim}, {"c", traj.spec.lapse_c}, {"slices", rows}}.dump(2) << '\n';
}

/// Slices of a trajectory CSV together with the recorded two_H column.
struct trajectory_records
{
    std::vector<Slice> slices;
    std::vector<BigInt> two_H;
};

/// Reads what write_trajectory_csv produced; throws range_error with the
/// line number on any malformed record.
inline trajectory_records read_trajectory_csv(std::istream& is, std::size_t dim)
{
    std::string line;
    if (!std::getline(is, line))
        throw range_error("trajectory file is empty");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != trajectory_csv_header(dim))
        throw range_error("trajectory header does not match dim " + std::to_string(dim));

    trajectory_records rec;
    std::size_t lineno = 1;
    while (std::getline(is, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ','))
            fields.push_back(f);
        if (fields.size() != 4 + 2 * dim)
            throw range_error("trajectory line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                              " fields, expected " + std::to_string(4 + 2 * dim));
        try
        {
            Slice s;
            const BigInt n = parse_bigint(fields[0]);
            if (!n.fits_slong_p())
                throw range_error("slice index out of range");
            s.n = n.get_si();
            s.tau = parse_bigint(fields[1]);
            s.two_pi = parse_bigint(fields[2]);
            rec.two_H.push_back(parse_bigint(fields[3]));
            for (std::size_t a = 0; a < dim; ++a)
            {
                s.x.push_back(parse_bigint(fields[4 + a]));
                s.p.push_back(parse_bigint(fields[4 + dim + a]));
            }
            rec.slices.push_back(std::move(s));
        }
        catch (const range_error& e)
        {
            throw range_error("trajectory line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rec;
}

} // namespace hamca
