#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jetvar/report.hpp"

using namespace jetvar;
using nlohmann::json;

namespace {

const std::string kCli = JETVAR_CLI;
const std::string kData = JETVAR_DATA;

json report(const std::string& command, const std::string& text, RunOptions o = {}) {
    ReportDocument doc = run(command, parse_spec(text), o);
    EXPECT_EQ(doc.exit_code, 0);
    return doc.body;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    return json::parse(in);
}

struct Shell {
    int status;
    std::string out;
};

Shell shell(const std::string& args) {
    std::string cmd = kCli + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string temp_file(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / ("jetvar_it_" + name);
    std::ofstream(path) << content;
    return path.string();
}

const char* kQQ = "lagrangian{kind:mechanics,n:1,k:2} L = q1_0 * q1_2";
const char* kSquare = "lagrangian { kind: mechanics, n: 1, k: 2 }\nL = 1/2 * q1_2^2";

}  // namespace

TEST(Report, MechanicsChain) {
    json r = report("constraints", kQQ);
    EXPECT_EQ(r["schema"], kReportSchema);
    EXPECT_EQ(r["tool"]["version"], kToolVersion);
    EXPECT_EQ(r["input"], "lagrangian { kind: mechanics, n: 1, k: 2 }\nL = q1_0*q1_2\n");
    const json& chain = r["chain"];
    EXPECT_EQ(chain["chain"], json::parse(R"([["2*q1_2"],["2*q1_3"]])"));
    EXPECT_EQ(chain["status"], "terminated-with-residual");
    EXPECT_EQ(chain["constraints"][0]["derivation"], "EL");
    EXPECT_EQ(chain["constraints"][1]["derivation"], "D_1 of parent");
    EXPECT_EQ(chain["constraints"][1]["parent"], 0);
    EXPECT_EQ(chain["residual_equations"][0]["expr"], "2*F1_3");
    EXPECT_EQ(chain["nominal_generations"], 2);
    EXPECT_EQ(chain["nominal_count_matches"], true);
}

TEST(Report, SquareOfSecondDerivative) {
    json a = report("analyze", kSquare);
    EXPECT_EQ(a["projectability"]["level"], "none");
    EXPECT_EQ(a["coefficients"][0]["L0"], "q1_4");
    json c = report("constraints", kSquare);
    EXPECT_EQ(c["chain"]["chain"], json::array());
    EXPECT_EQ(c["chain"]["status"], "terminated-identically");
    EXPECT_EQ(c["chain"]["determines_unknowns"], true);
    EXPECT_EQ(c["chain"]["solved_unknowns"]["F1_3"], "0");
}

TEST(Report, FieldAnalyze) {
    json r = report("analyze", "lagrangian { kind: field, m: 2 }\nL = 1/2 * u1_[1,1]^2");
    EXPECT_EQ(r["projectability"]["level"], "none");
    EXPECT_EQ(r["coefficients"][0]["L2"][0][1], "1/2*u1_[1,1]");
    EXPECT_EQ(r["coefficients"][0]["L2"][1][0], "1/2*u1_[1,1]");
    EXPECT_EQ(r["coefficients"][0]["L2"][0][0], "0");
}

TEST(Report, OptionsAndDeterminism) {
    RunOptions o;
    o.max_generations = 1;
    o.seed = 7;
    json r = report("constraints", kQQ, o);
    EXPECT_EQ(r["seed"], 7);
    EXPECT_EQ(r["max_generations"], 1);
    EXPECT_EQ(r["chain"]["status"], "max-iterations");
    EXPECT_EQ(report("constraints", kQQ, o).dump(), r.dump());
    EXPECT_FALSE(r.contains("timing"));
    o.timing = true;
    EXPECT_TRUE(report("constraints", kQQ, o).contains("timing"));
}

TEST(Report, LargeExpressionsBySize) {
    RunOptions o;
    o.print_limit = 3;
    json r = report("analyze", "lagrangian { kind: field, m: 1, n: 1 }\nL = (u1_[1] + u1_[0])^3", o);
    EXPECT_TRUE(r["coefficients"][0]["L0"].contains("dag_size"));
    EXPECT_TRUE(r["coefficients"][0]["L0"].contains("tree_size"));
}

TEST(Report, GravityVerifyTwoDimensions) {
    RunOptions o;
    o.dim = 2;
    ReportDocument doc = run("gravity-verify", parse_spec("lagrangian { kind: builtin:hilbert }"), o);
    EXPECT_EQ(doc.exit_code, 0);
    EXPECT_EQ(doc.body["dimension"], 2);
    EXPECT_EQ(doc.body["passed"], true);
    EXPECT_EQ(doc.body["projectability"]["level"], 1);
    bool found = false;
    for (const json& r : doc.body["results"]) {
        EXPECT_EQ(r["passed"], true) << r.dump();
        if (r["identity"] == "generation 1 vanishes in two dimensions") {
            found = true;
            EXPECT_EQ(r["points"], 20);
            EXPECT_LE(r["max_error"].get<double>(), 1e-9);
        }
    }
    EXPECT_TRUE(found);
    for (const json& c : doc.body["chain"]["constraints"])
        if (c["generation"] == 1) EXPECT_EQ(c["identically_zero"], true);
}

TEST(Report, FixturesAgree) {
    json fixtures = read_json(kData + "/fixtures.json");
    ReportDocument doc = fixtures_check(fixtures, {});
    EXPECT_EQ(doc.exit_code, 0);
    EXPECT_EQ(doc.body["passed"], true);
    std::set<std::string> seen;
    for (const json& r : doc.body["records"]) {
        EXPECT_EQ(r["passed"], true) << r.dump();
        seen.insert(r["quantity"].get<std::string>());
    }
    EXPECT_EQ(seen, (std::set<std::string>{"christoffel", "ricci", "scalar-curvature", "einstein-tensor", "hilbert-L",
                                           "mech-momenta", "mech-chain"}));
}

TEST(Report, FixtureMismatchIsAVerificationFailure) {
    json fixtures = read_json(kData + "/fixtures.json");
    for (json& r : fixtures["records"]) {
        if (r["quantity"] == "hilbert-L" && r["value"] != "0.0") {
            // 1e-8 relative: outside the 1e-9 tolerance.
            double v = std::stod(r["value"].get<std::string>());
            std::ostringstream s;
            s.precision(20);
            s << v * (1 + 1e-8);
            r["value"] = s.str();
            break;
        }
    }
    ReportDocument doc = fixtures_check(fixtures, {});
    EXPECT_EQ(doc.exit_code, 2);
    EXPECT_EQ(doc.body["passed"], false);
    fixtures["schema"] = "other/1";
    EXPECT_THROW(fixtures_check(fixtures, {}), std::invalid_argument);
}

TEST(Cli, ConstraintsJsonAndText) {
    std::string file = temp_file("qq.lag", kQQ);
    Shell a = shell("constraints " + file);
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(json::parse(a.out)["chain"]["chain"], json::parse(R"([["2*q1_2"],["2*q1_3"]])"));
    EXPECT_EQ(shell("constraints " + file).out, a.out);
    Shell b = shell("constraints " + file + " --format text --max-generations 4");
    EXPECT_EQ(b.status, 0);
    EXPECT_NE(b.out.find("status: terminated-with-residual"), std::string::npos) << b.out;
    EXPECT_NE(b.out.find("max_generations: 4"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(shell("analyze " + temp_file("bad.lag", "lagrangian { kind: field }\nL = u1_[1] +")).status, 1);
    EXPECT_EQ(shell("analyze " + temp_file("unknown.lag", "lagrangian { kind: field }\nL = x2")).status, 1);
    EXPECT_EQ(shell("analyze /nonexistent/file.lag").status, 1);
    EXPECT_EQ(shell("analyze " + temp_file("ok.lag", kSquare) + " --format yaml").status, 1);
    EXPECT_EQ(shell("gravity-verify --dim 5").status, 1);
    EXPECT_EQ(shell("gravity-verify " + temp_file("mech.lag", kSquare)).status, 1);
    EXPECT_EQ(shell("").status, 1);

    json fixtures = read_json(kData + "/fixtures.json");
    for (json& r : fixtures["records"])
        if (r["quantity"] == "mech-chain") r["value"] = json::parse(R"([["2*q1_2"]])");
    Shell bad = shell("fixtures-check --fixtures " + temp_file("fixtures.json", fixtures.dump()));
    EXPECT_EQ(bad.status, 2);
    EXPECT_EQ(json::parse(bad.out)["passed"], false);
}

TEST(Cli, GravityVerifyAndFixtures) {
    Shell g = shell("gravity-verify --d 2 --points 20 --seed 11");
    EXPECT_EQ(g.status, 0);
    json r = json::parse(g.out);
    EXPECT_EQ(r["seed"], 11);
    EXPECT_EQ(r["passed"], true);
    EXPECT_EQ(shell("gravity-verify --d 2 --points 20 --seed 11").out, g.out);
    Shell f = shell("fixtures-check --fixtures " + kData + "/fixtures.json");
    EXPECT_EQ(f.status, 0);
    EXPECT_EQ(json::parse(f.out)["passed"], true);
}
