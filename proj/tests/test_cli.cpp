#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <delta_lab/cli.hpp>

using delta_lab::cli::Json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "delta_lab");
    std::ostringstream out, err;
    int code = delta_lab::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// objects keep their keys, arrays collapse to their first element, scalars become type names
Json skeleton(const Json& j) {
    if (j.is_object()) {
        Json s = Json::object();
        for (auto it = j.begin(); it != j.end(); ++it)
            s[it.key()] = it.key() == "measured" || it.key() == "tolerance" ? Json("object") : skeleton(it.value());
        return s;
    }
    if (j.is_array()) return j.empty() ? Json::array() : Json::array({skeleton(j.front())});
    if (j.is_boolean()) return "boolean";
    if (j.is_number()) return "number";
    if (j.is_string()) return "string";
    return "null";
}

}  // namespace

TEST(Cli, ExpsumExample) {
    auto r = call({"expsum", "--q", "7", "--m", "1,1,1", "--n", "1,1,1"});
    EXPECT_EQ(r.code, 0);
    auto j = Json::parse(r.out);
    EXPECT_EQ(j["q"], 7);
    EXPECT_EQ(j["value"], "-1372");
    EXPECT_EQ(j["method"], "closed_form");
    auto b = Json::parse(call({"expsum", "--q", "7", "--m", "1,1,1", "--n", "1,1,1", "--method", "brute"}).out);
    EXPECT_EQ(b["value"], "-1372");
}

TEST(Cli, SeriesSlope) {
    auto r = call({"series", "--x", "100000"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = Json::parse(r.out);
    ASSERT_TRUE(j.contains("slope"));
    EXPECT_NEAR(j["slope"].get<double>(), 0.41597, 0.03);
}

TEST(Cli, AuditExitCodes) {
    auto r = call({"audit", "--lemma", "n-vanishing", "--box", "1", "--qmax", "12"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(Json::parse(r.out)["passed"].get<bool>());
    EXPECT_EQ(call({"audit", "--lemma", "no-such-lemma"}).code, 1);
}

TEST(Cli, ValidationErrors) {
    EXPECT_EQ(call({"expsum", "--q", "7", "--bogus"}).code, 1);
    EXPECT_EQ(call({"expsum", "--m", "1,1,1"}).code, 1);
    EXPECT_EQ(call({"expsum", "--q", "7", "--m", "1,1"}).code, 1);
    auto g = call({"expsum", "--q", "20", "--method", "brute"});
    EXPECT_EQ(g.code, 1);
    EXPECT_FALSE(g.err.empty());
    EXPECT_EQ(call({"rho", "--p", "17"}).code, 1);
    EXPECT_EQ(call({"nonsense"}).code, 1);
}

TEST(Cli, CsvOutput) {
    auto r = call({"expsum", "--q", "5", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "q,value,method");
    EXPECT_EQ(row, "5,500,closed_form");
    EXPECT_FALSE(std::getline(in, extra) && !extra.empty());
}

TEST(Cli, ConfigFileWithOverride) {
    std::string path = ::testing::TempDir() + "delta_lab_cli_test.cfg";
    {
        std::ofstream f(path);
        f << "# sample\nq = 7\nm = 1,1,1\nn = 1,1,1\n";
    }
    auto a = Json::parse(call({"expsum", "--config", path}).out);
    EXPECT_EQ(a["value"], "-1372");
    auto b = Json::parse(call({"expsum", "--config", path, "--q", "5", "--m", "0,0,0", "--n", "0,0,0"}).out);
    EXPECT_EQ(b["q"], 5);
    EXPECT_EQ(b["value"], "500");
    std::remove(path.c_str());
}

TEST(Cli, DeterministicOutput) {
    std::vector<std::string> args{"density", "--method", "slab", "--eps", "0.01", "--samples", "200000"};
    auto a = call(args), b = call(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    auto c = call({"density", "--method", "slab", "--eps", "0.01", "--samples", "200000", "--seed", "5"});
    EXPECT_NE(a.out, c.out);
}

TEST(Cli, ReportMatchesGoldenSchema) {
    auto r = call({"report", "--quick", "--only", "2,7"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = Json::parse(r.out);
    std::ifstream g(std::string(DELTA_LAB_GOLDEN_DIR) + "/report_schema.json");
    ASSERT_TRUE(g.good());
    Json golden = Json::parse(g);
    EXPECT_EQ(skeleton(j), golden) << skeleton(j).dump(2);
    EXPECT_EQ(j["criteria"].size(), 2u);
    EXPECT_EQ(call({"report", "--quick", "--only", "2,7"}).out, r.out);
}
