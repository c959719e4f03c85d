#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "hamca/config.hpp"
#include "hamca/io.hpp"
#include "support.hpp"

using namespace hamca;

namespace
{

const std::string period4 = R"({
  "dim": 1, "S": [[1]], "A": [[0]], "c": 2,
  "x0": [1], "p0": [0], "tau0": 0, "two_pi0": 0,
  "x1": [0], "p1": [-1], "steps": 8
})";

std::string field_of(const std::string& text)
{
    try
    {
        parse_config(text);
    }
    catch (const config_semantic_error& e)
    {
        return e.field();
    }
    return "<none>";
}

} // namespace

TEST(ParseConfig, MinimalPeriodFourOrbit)
{
    const auto cfg = parse_config(period4);
    EXPECT_EQ(cfg.spec.dim, 1u);
    EXPECT_EQ(cfg.spec.lapse_c, 2);
    EXPECT_EQ(cfg.steps, 8u);
    const auto traj = evolve(cfg.spec, cfg.seed, cfg.steps);
    ASSERT_EQ(traj.size(), 10u);
    const long re[] = {1, 0, -1, 0};
    const long im[] = {0, -1, 0, 1};
    for (std::size_t k = 0; k < traj.size(); ++k)
    {
        EXPECT_EQ(traj.slices[k].x[0], re[k % 4]) << k;
        EXPECT_EQ(traj.slices[k].p[0], im[k % 4]) << k;
    }
}

TEST(ParseConfig, DefaultsMatchExplicitSeed)
{
    const auto cfg = parse_config(period4);
    EXPECT_EQ(cfg.seed, test::period4_seed());
    EXPECT_EQ(cfg.scale_l, 1.0);
    EXPECT_FALSE(cfg.budget.has_value());
    EXPECT_EQ(cfg.format, "csv");
}

TEST(ParseConfig, AsymmetricSNamesTheField)
{
    const auto text = R"({"S": [[0, 1], [2, 0]], "c": 2, "x0": [0, 0], "p0": [0, 0], "x1": [0, 0], "p1": [0, 0]})";
    EXPECT_EQ(field_of(text), "S");
    try
    {
        parse_config(text);
    }
    catch (const config_semantic_error& e)
    {
        EXPECT_NE(std::string(e.what()).find("\"S\""), std::string::npos) << e.what();
    }
}

TEST(ParseConfig, SemanticFieldPaths)
{
    EXPECT_EQ(field_of(R"({"S": [[0, 1], [1, 0]], "A": [[1, 0], [0, 0]], "c": 2,
                          "x0": [0, 0], "p0": [0, 0], "x1": [0, 0], "p1": [0, 0]})"),
              "A");
    EXPECT_EQ(field_of(R"({"dim": 3, "S": [[1]], "c": 2, "x0": [0], "p0": [0], "x1": [0], "p1": [0]})"), "dim");
    EXPECT_EQ(field_of(R"({"S": [[1]], "x0": [0], "p0": [0], "x1": [0], "p1": [0]})"), "c");
    EXPECT_EQ(field_of(R"({"S": [[1]], "c": 2, "x0": [0, 1], "p0": [0], "x1": [0], "p1": [0]})"), "x0");
    EXPECT_EQ(field_of(R"({"S": [[1]], "c": 2, "x0": [0], "p0": [0], "x1": [0], "p1": [0], "steps": -1})"), "steps");
    EXPECT_EQ(field_of(R"({"S": [[1]], "c": 2, "x0": [0], "p0": [0], "x1": [0], "p1": [0], "scale_l": 0})"), "scale_l");
    EXPECT_EQ(field_of(R"({"S": [[1]], "c": 2, "x0": [0.5], "p0": [0], "x1": [0], "p1": [0]})"), "x0[0]");
    EXPECT_EQ(field_of(R"({"S": [[1]], "c": 2, "x0": [0], "p0": [0], "x1": [0], "p1": [0],
                          "output": {"format": "xml"}})"),
              "output.format");
    EXPECT_EQ(field_of("[1, 2]"), "");
}

TEST(ParseConfig, StepsOmittedGivesSeedPairOnly)
{
    const auto cfg = parse_config(R"({"S": [[1]], "c": 2, "x0": [1], "p0": [0], "x1": [0], "p1": [-1]})");
    EXPECT_EQ(cfg.steps, 0u);
    const auto traj = evolve(cfg.spec, cfg.seed, cfg.steps);
    ASSERT_EQ(traj.size(), 2u);
    EXPECT_EQ(traj.slices[0], cfg.seed.prev);
    EXPECT_EQ(traj.slices[1], cfg.seed.curr);
}

TEST(ParseConfig, SyntaxErrors)
{
    EXPECT_THROW(parse_config("{\"S\": [[1]],"), config_syntax_error);
    EXPECT_THROW(parse_config(""), config_syntax_error);
    EXPECT_THROW(parse_config("{'S': 1}"), config_syntax_error);
}

TEST(ParseConfig, DecimalStringIntegersKeepEveryDigit)
{
    const std::string big = "123456789012345678901234567890";
    const auto cfg = parse_config(R"({"S": [["2"]], "c": 2, "x0": [")" + big + R"("], "p0": [0],
                                      "x1": ["-)" + big + R"("], "p1": [0], "two_pi0": ")" + big + R"("})");
    EXPECT_EQ(cfg.seed.prev.x[0].get_str(), big);
    EXPECT_EQ(cfg.seed.curr.x[0].get_str(), "-" + big);
    EXPECT_EQ(cfg.seed.prev.two_pi.get_str(), big);
    EXPECT_EQ(cfg.spec.parts.S(0, 0), BigInt(2));
}

TEST(ParseConfig, SecondPiDefaultsToEnergyDifference)
{
    const auto cfg = parse_config(R"({"S": [[0, 1], [1, 0]], "c": 2, "x0": [1, 2], "p0": [0, 1],
                                      "x1": [3, 0], "p1": [1, 1], "two_pi0": 5})");
    const auto two_h0 = hamiltonian_doubled(cfg.spec, cfg.seed.prev);
    const auto two_h1 = hamiltonian_doubled(cfg.spec, cfg.seed.curr);
    EXPECT_EQ(cfg.seed.curr.two_pi, 5 + two_h1 - two_h0);
    EXPECT_EQ(cfg.seed.curr.tau, 1);
}

TEST(ParseProblemConfig, ExplicitAndRandomH)
{
    const auto a = parse_problem_config(R"({"h": {"re": [[1, 0.5], [0.5, -1]], "im": [[0, 0.25], [-0.25, 0]]},
                                            "M": 8, "psi0": {"re": [1, 0], "im": [0, 0]}})");
    EXPECT_EQ(a.h(0, 1), cplx(0.5, 0.25));
    EXPECT_EQ(a.M, 8);
    EXPECT_EQ(a.M_prime, 8000);
    ASSERT_TRUE(a.psi0.has_value());
    EXPECT_EQ(a.problem().scale_M, 8);

    const auto b = parse_problem_config(R"({"random_h": {"dim": 4, "seed": 7}, "M_values": [4, 8, 16, 32]})");
    EXPECT_EQ(b.h, random_hermitian(4, 7));
    EXPECT_EQ(b.M_values.size(), 4u);
}

TEST(ParseProblemConfig, SemanticErrors)
{
    auto field = [](const std::string& text) {
        try
        {
            parse_problem_config(text);
        }
        catch (const config_semantic_error& e)
        {
            return e.field();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(field(R"({"h": [[0, 1], [2, 0]]})"), "h");
    EXPECT_EQ(field(R"({})"), "h");
    EXPECT_EQ(field(R"({"h": [[1]], "M": 4, "M_prime": 4})"), "M_prime");
    EXPECT_EQ(field(R"({"h": [[1]], "psi0": [1, 0]})"), "psi0");
    EXPECT_EQ(field(R"({"h": [[1]], "Q": 0})"), "Q");
    EXPECT_EQ(field(R"({"random_h": {"dim": 0, "seed": 1}})"), "random_h.dim");
}

TEST(TrajectoryCsv, RoundTripsLargeIntegers)
{
    const auto spec = make_spec(test::imat({{2, 1}, {1, -1}}), test::imat({{0, 1}, {-1, 0}}), 2);
    std::mt19937_64 rng(8);
    const auto traj = evolve(spec, test::random_pair(rng, 2, 1'000'000), 60);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "n,tau,two_pi,two_H,x0,x1,p0,p1");
    std::istringstream is(os.str());
    const auto rec = read_trajectory_csv(is, 2);
    EXPECT_EQ(rec.slices, traj.slices);
    for (std::size_t k = 0; k < traj.size(); ++k)
        EXPECT_EQ(rec.two_H[k], hamiltonian_doubled(spec, traj.slices[k]));
}

TEST(TrajectoryCsv, RejectsMalformedRows)
{
    std::istringstream bad_header("n,tau\n");
    EXPECT_THROW(read_trajectory_csv(bad_header, 1), range_error);
    std::istringstream bad_cell("n,tau,two_pi,two_H,x0,p0\n0,0,0,0,1x,0\n");
    EXPECT_THROW(read_trajectory_csv(bad_cell, 1), range_error);
}

TEST(JsonInteger, StringBeyondFifteenDigits)
{
    EXPECT_TRUE(json_integer(BigInt("123456789012345")).is_number_integer());
    EXPECT_TRUE(json_integer(BigInt("-123456789012345")).is_number_integer());
    EXPECT_EQ(json_integer(BigInt("1234567890123456")), nlohmann::json("1234567890123456"));
}
