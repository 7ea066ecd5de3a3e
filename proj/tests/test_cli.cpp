#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("vexm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write_case(const std::string& name, const Json& j) const {
        const auto p = path(name);
        std::ofstream(p, std::ios::binary) << j.dump(2);
        return p;
    }

    CliRun run(const std::string& args) const {
        const std::string err = path("stderr.txt");
        const std::string cmd = std::string(VEXM_CLI_PATH) + " " + args + " 2>" + err;
        CliRun r;
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (!pipe) return r;
        char buf[4096];
        std::size_t n;
        while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
        const int status = ::pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = slurp(err);
        return r;
    }

    fs::path dir_;
};

Json pinned() {
    return Json::parse(R"({
        "id": "pinned",
        "theorem": "MainMorrey",
        "domain": {"shape": "interval", "bounds": [-1, 1], "resolution": 200},
        "gamma": 0.5, "a": 0, "b": 0,
        "p": {"kind": "constant", "value": 1.25},
        "lambda": {"kind": "constant", "value": 0.2},
        "family": {"count": 3}
    })");
}

Json a_above_b() {
    Json j = pinned();
    j["id"] = "a_above_b";
    j["a"] = 0.1;
    return j;
}

std::string source_case(const std::string& name) { return std::string(VEXM_SOURCE_DIR) + "/cases/" + name; }

}  // namespace

TEST_F(Cli, CheckAdmissibleExitsZero) {
    const auto r = run("check " + write_case("c.json", pinned()));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("overall: admissible"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("condD"), std::string::npos);
}

TEST_F(Cli, CheckInadmissibleExitsTwo) {
    const auto r = run("check " + write_case("c.json", a_above_b()));
    EXPECT_EQ(r.code, 2);
    std::istringstream lines(r.out);
    std::string line;
    bool cond_a_failed = false;
    while (std::getline(lines, line))
        if (line.rfind("condA", 0) == 0) cond_a_failed = line.find("FAILED") != std::string::npos;
    EXPECT_TRUE(cond_a_failed) << r.out;
}

TEST_F(Cli, CheckMissingKeyExitsOne) {
    Json j = pinned();
    j.erase("gamma");
    const auto r = run("check " + write_case("c.json", j));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("'gamma'"), std::string::npos) << r.err;
}

TEST_F(Cli, CheckMalformedJsonGivesLineAndColumn) {
    const auto p = path("bad.json");
    std::ofstream(p) << "{\n  \"id\": \"x\"\n  \"gamma\": 1\n}\n";
    const auto r = run("check " + p);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 3, column 9"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("check").code, 1);
    EXPECT_EQ(run("check " + path("missing.json")).code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, CheckJson) {
    const auto r = run("check --json " + write_case("c.json", a_above_b()));
    EXPECT_EQ(r.code, 2);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["admissible"], false);
    EXPECT_EQ(j["case_id"], "a_above_b");
    EXPECT_TRUE(j["verdict"]["conditions"].is_array());
}

TEST_F(Cli, NormOfIndicatorIsSqrtTwo) {
    Json j = pinned();
    j["p"] = {{"kind", "constant"}, {"value", 2}};
    const auto c = write_case("c.json", j);
    auto r = run("norm " + c + " --function one");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("lebesgue_norm 1.414214"), std::string::npos) << r.out;
    r = run("norm " + c + " --function zero");
    EXPECT_NE(r.out.find("lebesgue_norm 0.000000"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("morrey_norm   0.000000"), std::string::npos) << r.out;
}

TEST_F(Cli, NormLambdaZeroAgrees) {
    Json j = pinned();
    j["p"] = {{"kind", "sine"}, {"c", 2.0}, {"amplitude", 0.5}, {"frequency", 3}};
    j["lambda"] = {{"kind", "constant"}, {"value", 0}};
    const auto c = write_case("c.json", j);
    for (const char* fn : {"bump:0.1:0.5", "trig:4", "power:0.5", "indicator:-0.5:0.3"}) {
        const auto r = run("norm --json " + c + " --function " + fn);
        ASSERT_EQ(r.code, 0) << r.err;
        const Json out = Json::parse(r.out);
        const double leb = out["lebesgue"]["value"], mor = out["morrey"]["value"];
        EXPECT_GT(leb, 0.0);
        EXPECT_NEAR(mor, leb, 1e-6) << fn;
        EXPECT_GT(out["lebesgue"]["iterations"].get<int>(), 0);
    }
    EXPECT_EQ(run("norm " + c + " --function wave:1").code, 1);
    EXPECT_EQ(run("norm " + c + " --function bump:0.1").code, 1);
}

TEST_F(Cli, RatioWritesReport) {
    const auto out = path("report.json");
    const auto r = run("ratio --json " + write_case("c.json", pinned()) + " --out " + out + " --format json");
    ASSERT_EQ(r.code, 0) << r.err;
    const Json summary = Json::parse(r.out);
    EXPECT_GT(summary["sup_ratio"].get<double>(), 0.0);
    EXPECT_EQ(summary["report"], out);
    const Json report = Json::parse(slurp(out));
    ASSERT_EQ(report.size(), 1u);
    EXPECT_EQ(report[0]["members"].size(), 9u);

    const auto text = run("ratio " + write_case("c.json", pinned()) + " --out " + path("r.csv"));
    EXPECT_NE(text.out.find("sup_ratio "), std::string::npos);
    const auto csv = slurp(path("r.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
}

TEST_F(Cli, RatioRefusesInadmissibleCase) {
    const auto c = write_case("c.json", a_above_b());
    const auto out = path("report.csv");
    auto r = run("ratio " + c + " --out " + out);
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_NE(r.out.find("--allow-inadmissible"), std::string::npos);

    r = run("ratio --json " + c + " --out " + out + " --allow-inadmissible --format json");
    EXPECT_EQ(r.code, 2);
    ASSERT_TRUE(fs::exists(out));
    EXPECT_EQ(Json::parse(r.out)["forced"], true);
    const Json report = Json::parse(slurp(out));
    EXPECT_EQ(report[0]["forced"], true);
    EXPECT_EQ(report[0]["admissible"], false);
}

TEST_F(Cli, SweepOverLattice) {
    Json j = pinned();
    j["lattice"] = {{"a", {-0.2, -0.1, 0.0}}, {"b_equals_a", true}};
    const auto out = path("sweep.json");
    const auto r = run("sweep " + write_case("c.json", j) + " --out " + out + " --format json");
    ASSERT_EQ(r.code, 0) << r.err;
    const Json reports = Json::parse(slurp(out));
    ASSERT_TRUE(reports.is_array());
    ASSERT_EQ(reports.size(), 3u);
    EXPECT_EQ(reports[0]["a"], -0.2);
    EXPECT_EQ(reports[2]["b"], 0.0);
    // progress goes to standard error
    EXPECT_NE(r.err.find("case 3/3"), std::string::npos) << r.err;
}

TEST_F(Cli, SweepCsvIsByteDeterministic) {
    const auto c = source_case("weight_lattice.json");
    const auto before = slurp(c);
    ASSERT_EQ(run("sweep " + c + " --out " + path("a.csv")).code, 0);
    ASSERT_EQ(run("sweep " + c + " --out " + path("b.csv")).code, 0);
    const auto a = slurp(path("a.csv"));
    EXPECT_EQ(a, slurp(path("b.csv")));
    // a = b = -0.2 fails condB and is skipped
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2 * 30);
    EXPECT_EQ(slurp(c), before);  // the case file is never touched
}

TEST_F(Cli, RefinePrintsOneRowPerResolution) {
    Json j = pinned();
    j["resolutions"] = {250, 500, 1000};
    const auto c = write_case("c.json", j);
    auto r = run("refine " + c + " --out " + path("r.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* res : {"\n250 ", "\n500 ", "\n1000 "}) EXPECT_NE(r.out.find(res), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("stability "), std::string::npos);

    r = run("refine --json " + c + " --out " + path("r.csv") + " --resolutions 100,200,400");
    ASSERT_EQ(r.code, 0) << r.err;
    const Json out = Json::parse(r.out);
    ASSERT_EQ(out["refinement"].size(), 3u);
    EXPECT_EQ(out["refinement"][2]["resolution"], 400);

    EXPECT_EQ(run("refine " + c + " --out " + path("r.csv") + " --resolutions 100,200").code, 1);
}

TEST_F(Cli, ErrorsUnderJsonAreParseable) {
    Json j = pinned();
    j.erase("gamma");
    const auto r = run("ratio --json " + write_case("c.json", j));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(Json::parse(r.out)["error"].get<std::string>().find("gamma"), std::string::npos);
}

TEST_F(Cli, InterruptedRunLeavesNoPartialFile) {
    // a slow lattice sweep, terminated at staggered times
    Json j = pinned();
    j["domain"]["resolution"] = 1500;
    j["family"]["count"] = 10;
    j["lattice"] = {{"a", {-0.2, -0.15, -0.1, -0.05, 0.0}}, {"b_equals_a", true}};
    const auto c = write_case("c.json", j);
    for (int delay_ms : {20, 150, 400, 900}) {
        const auto out = path("out_" + std::to_string(delay_ms) + ".json");
        const std::string cmd = std::string(VEXM_CLI_PATH) + " sweep " + c + " --format json --out " + out +
                                " 2>/dev/null & pid=$!; sleep " + std::to_string(delay_ms / 1000.0) +
                                "; kill -TERM $pid; wait $pid";
        ASSERT_NE(std::system(cmd.c_str()), -1);
        EXPECT_FALSE(fs::exists(out + ".partial")) << delay_ms;
        if (fs::exists(out)) {
            // finished before the signal: the file must be complete
            const Json reports = Json::parse(slurp(out));
            EXPECT_EQ(reports.size(), 5u);
        }
    }
}
