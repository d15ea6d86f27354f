#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "kstab/app.hpp"

using namespace kstab;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kstab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = app::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string kReference =
    R"({"fiber": {"standard_simplex": {"l": 2}}, "factors": [{"n": 3, "s": 18, "c": 12, "p": [1, 2]}]})";

std::string rank_one(const std::string& c) {
  return R"({"fiber": {"standard_simplex": {"l": 1}}, "factors": [{"n": 3, "s": -6, "c": ")" + c +
         R"(", "p": [1]}]})";
}

// Needs one bisection level before the Bernstein coefficients turn positive.
const std::string kNonConcave =
    R"({"fiber": {"standard_simplex": {"l": 2}}, "factors": [{"n": 2, "s": 60, "c": 3, "p": [1, 0]}]})";

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Cli, CheckFanoReportsMinimum) {
  const auto r = cli({"check-fano", "--inline", kReference, "--text"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("The minimum of the condition on vertices is 39718961/67470350"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("convention: canonical"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"check-fano", "--inline", rank_one("15")}).code, 0);
  EXPECT_EQ(cli({"check-fano", "--inline", rank_one("11/10")}).code, 2);
  EXPECT_EQ(cli({"check-fano", "--inline", kNonConcave, "--depth", "0"}).code, 3);
  EXPECT_EQ(cli({"check-fano", "--inline", kNonConcave, "--depth", "1"}).code, 0);
  EXPECT_EQ(cli({"check-fano", "--inline", "{"}).code, 1);
  EXPECT_EQ(cli({"bogus"}).code, 1);
  EXPECT_EQ(cli({"check-fano", "--inline", kReference, "--resolution", "0"}).code, 1);
}

TEST(Cli, DecimalLiteralsRejected) {
  const auto r = cli({"check-fano", "--inline", rank_one("15").replace(rank_one("15").find("\"15\""), 4, "1.5")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("a/b"), std::string::npos) << r.err;
  const auto s = cli({"check-fano", "--inline", rank_one("1.5")});
  EXPECT_EQ(s.code, 1);
  EXPECT_NE(s.err.find("a/b"), std::string::npos) << s.err;
}

TEST(Cli, SchemaErrorsNameTheField) {
  const auto r = cli({"lext", "--inline", R"({"fiber": {"standard_simplex": {"l": 2}}, "factors": [{"s": 1, "c": 2}]})"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("factors[0]"), std::string::npos) << r.err;
}

TEST(Cli, LextOnFanoProduct) {
  const auto r = cli({"lext", "--inline", R"({"fiber": {"standard_simplex": {"l": 2}}, "factors": [{"n": 3, "I": 3}]})"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["constant"].get<bool>());
  EXPECT_EQ(j["l_ext"]["constant"], "10");
  EXPECT_EQ(j["convention"], "canonical");
  const auto legacy = json::parse(cli({"lext", "--inline", kReference, "--legacy-sign"}).out);
  EXPECT_EQ(legacy["convention"], "legacy");
}

TEST(Cli, Determinism) {
  for (const auto& cmd : {"check-fano", "check", "probe", "lext", "info"}) {
    const auto a = cli({cmd, "--inline", kReference});
    const auto b = cli({cmd, "--inline", kReference});
    EXPECT_EQ(a.code, b.code) << cmd;
    EXPECT_EQ(a.out, b.out) << cmd;
    EXPECT_FALSE(a.out.empty()) << cmd;
  }
}

TEST(Cli, WitnessRoundTrip) {
  const auto r = cli({"check-fano", "--inline", rank_one("11/10")});
  ASSERT_EQ(r.code, 2);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["verdict"], "ConditionFails");
  const Point x = io::point_from_json(j["witness"]["point"], "witness");
  const Rational val = parse_rational(j["witness"]["value"].get<std::string>());
  const auto fib = io::fibration_from_json(json::parse(rank_one("11/10"))).data();
  const AffineFunc l = io::affine_from_json(j["l_ext"], "l_ext");
  EXPECT_EQ(condition_value_fano(fib, l, x), val);
  EXPECT_LT(val, 0);
}

TEST(Cli, OutFileMatchesStdout) {
  const auto path = temp_file("kstab_cli_out.json");
  const auto a = cli({"check-fano", "--inline", kReference});
  ASSERT_EQ(cli({"check-fano", "--inline", kReference, "--out", path.string()}).code, 0);
  std::ifstream f(path);
  const std::string body((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(body, a.out);
  std::filesystem::remove(path);
}

TEST(Cli, TableExport) {
  const auto path = temp_file("kstab_cli_table.csv");
  ASSERT_EQ(cli({"check-fano", "--inline", kReference, "--table", path.string(), "--samples", "2"}).code, 0);
  std::ifstream f(path);
  std::string header, line;
  std::getline(f, header);
  EXPECT_EQ(header, "x1,x2,facet,value");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  EXPECT_GT(rows, 0);
  std::filesystem::remove(path);
}

TEST(Cli, ThresholdCanonical) {
  const auto r = cli({"threshold", "--inline",
                      R"({"fiber": {"standard_simplex": {"l": 2}}, "factors": [{"n": 3, "s": 24, "c": "c", "p": [1, 2]}]})",
                      "--var", "c", "--lo", "4", "--hi", "20", "--tol", "1/100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  const Rational lo = parse_rational(j["threshold"]["lo"].get<std::string>());
  const Rational hi = parse_rational(j["threshold"]["hi"].get<std::string>());
  EXPECT_LE(hi - lo, Rational(1, 100));
  EXPECT_LT(lo, Rational(78994, 10000));
  EXPECT_GT(hi, Rational(78994, 10000));
  EXPECT_EQ(j["convention"], "canonical");
  EXPECT_EQ(cli({"threshold", "--inline", kReference, "--lo", "4"}).code, 1);
}

TEST(Cli, ProbeFindsNothingOnCertifiedInstance) {
  const auto r = cli({"probe", "--inline", kReference, "--resolution", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["convention"], "canonical");
  EXPECT_GT(parse_rational(j["min_ratio"].get<std::string>()), 0);
}

TEST(Sweep, EmptyGrid) {
  const auto r = cli({"sweep", "--inline",
                      R"({"command": "check-fano", "template": {}, "grid": {"c": {"from": 2, "to": 1}}})"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["rows"].empty());
}

TEST(Sweep, RankOneGrid) {
  const std::string job = R"({"command": "check-fano",
    "template": {"fiber": {"standard_simplex": {"l": 1}},
                 "factors": [{"n": 3, "s": -6, "c": "$c", "p": ["$p"]}]},
    "grid": {"p": {"from": 1, "to": 10}}, "derived": {"c": {"p": 15}}})";
  const auto r = cli({"sweep", "--inline", job});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 10u);
  for (const auto& row : j["rows"]) EXPECT_EQ(row["report"]["verdict"], "CertifiedSufficient");
  EXPECT_EQ(j["rows"][3]["point"]["c"], "60");
}

TEST(Sweep, ExFanoGridAndDeterministicOrder) {
  const std::string job = R"({"command": "check-fano",
    "template": {"fiber": {"standard_simplex": {"l": 2}},
                 "factors": [{"n": 3, "s": "$s", "c": "$c", "p": ["$p1", "$p2"]}]},
    "grid": {"I": [1, 2, 3, 4], "p1": {"from": 1, "to": 5}, "p2": {"from": 1, "to": 5}},
    "derived": {"s": {"I": 6}, "c": {"p2": 7}}, "constraints": ["p1 <= p2"]})";
  const auto a = cli({"sweep", "--inline", job, "--threads", "1"});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto j = json::parse(a.out);
  ASSERT_EQ(j["rows"].size(), 60u);
  for (const auto& row : j["rows"]) EXPECT_EQ(row["exit"], 0);
  EXPECT_EQ(cli({"sweep", "--inline", job, "--threads", "3"}).out, a.out);
}

TEST(Sweep, WorstExitCodeWins) {
  const std::string job = R"({"command": "check-fano",
    "template": {"fiber": {"standard_simplex": {"l": 1}},
                 "factors": [{"n": 3, "s": -6, "c": "$c", "p": [1]}]},
    "grid": {"c": ["11/10", 15]}})";
  const auto r = cli({"sweep", "--inline", job});
  EXPECT_EQ(r.code, 2);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["rows"][0]["exit"], 2);
  EXPECT_EQ(j["rows"][1]["exit"], 0);
}
