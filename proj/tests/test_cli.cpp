#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include <json.hpp>

#include <sdagw/structured.hpp>

using namespace sdagw;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args, bool with_stderr = false, const std::string& env = "") {
    std::string cmd = env + " " + std::string(SDAGW_CLI) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    CliRun r;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        dir = fs::temp_directory_path() / ("sdagw_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string file(const std::string& name, const std::string& text) {
        fs::path p = dir / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_F(Cli, WidthOfSmallGraphs) {
    std::string c3 = file("c3.txt", "3 3\n0 1\n1 2\n2 0\n");
    CliRun r = run("width " + c3);
    ASSERT_EQ(r.code, 0);
    json j = json::parse(r.out);
    EXPECT_TRUE(j["found"].get<bool>());
    EXPECT_EQ(j["k"], 2);
    EXPECT_LE(j["game_stats"]["states_evaluated"].get<std::uint64_t>(), j["game_stats"]["state_bound"].get<std::uint64_t>());

    CliRun e = run("width " + file("edge.txt", "2 1\n0 1\n"));
    ASSERT_EQ(e.code, 0);
    EXPECT_EQ(json::parse(e.out)["k"], 1);

    CliRun capped = run("width " + c3 + " --max-k 1");
    EXPECT_EQ(capped.code, 2);
    EXPECT_FALSE(json::parse(capped.out)["found"].get<bool>());
}

TEST_F(Cli, EmittedSdagRevalidates) {
    std::string g = path("g.txt");
    ASSERT_EQ(run("gen graph --model 'erdos(0.35)' --n 6 --seed 4 -o " + g).code, 0);
    ASSERT_EQ(run("width " + g + " --nice --emit " + path("s.json")).code, 0);
    CliRun v = run("validate-sdag " + g + " " + path("s.json") + " --nice");
    ASSERT_EQ(v.code, 0) << v.out;
    json j = json::parse(v.out);
    EXPECT_TRUE(j["valid"].get<bool>());
    EXPECT_TRUE(j["nice"]["nice"].get<bool>());

    ASSERT_EQ(run("width " + g + " --emit " + path("raw.json")).code, 0);
    ASSERT_EQ(run("nicefy " + g + " " + path("raw.json") + " --emit " + path("n.json")).code, 0);
    EXPECT_EQ(run("validate-sdag " + g + " " + path("n.json") + " --nice").code, 0);

    std::string c3 = file("c3.txt", "3 3\n0 1\n1 2\n2 0\n");
    // A lone node is the trivial certificate of width n.
    CliRun lone = run("validate-sdag " + c3 + " " + file("lone.json", R"({"universe":3,"nodes":[0],"arcs":[],"sigma":{}})"));
    ASSERT_EQ(lone.code, 0);
    EXPECT_EQ(json::parse(lone.out)["width"], 3);
    CliRun broken = run("validate-sdag " + c3 + " " + file("broken.json", R"({"universe":3,"nodes":[0,1],"arcs":[[0,1]],"sigma":{"0->1":{"a":[],"b":[0]}}})"));
    EXPECT_EQ(broken.code, 2);
    EXPECT_FALSE(json::parse(broken.out)["separations_ok"].get<bool>());
}

TEST_F(Cli, GameGraph) {
    std::string c3 = file("c3.txt", "3 3\n0 1\n1 2\n2 0\n");
    CliRun r = run("game-graph " + c3 + " --k 1 --emit-dot " + path("g.dot"));
    ASSERT_EQ(r.code, 0);
    json j = json::parse(r.out);
    EXPECT_FALSE(j["cop_wins_all_starts"].get<bool>());
    EXPECT_EQ(j["graph"].size(), j["states"].get<std::size_t>());
    EXPECT_TRUE(fs::exists(path("g.dot")));
    EXPECT_TRUE(json::parse(run("game-graph " + c3 + " --k 2").out)["cop_wins_all_starts"].get<bool>());
    EXPECT_EQ(run("game-graph " + c3).code, 1);
    CliRun capped = run("game-graph " + c3 + " --k 2", true, "SDAG_BUDGET_STATES=10");
    EXPECT_EQ(capped.code, 1);
    EXPECT_NE(capped.out.find("budget"), std::string::npos) << capped.out;
}

TEST_F(Cli, SolveExample) {
    // 0 (Even, priority 2) and 1 (Odd, priority 1) on a 2-cycle with a self-loop at 1.
    std::string g = file("g.pg", "parity 1;\n0 2 0 1 \"a\";\n1 1 1 0,1 \"b\";\n");
    CliRun r = run("solve " + g + " --unroll-loops --engine both");
    ASSERT_EQ(r.code, 0) << r.out;
    json j = json::parse(r.out);
    EXPECT_TRUE(j["agree"].get<bool>());
    EXPECT_EQ(j["odd"], json::array({0, 1, 2}));

    std::string two = file("two.pg", "parity 1;\n0 0 0 1;\n1 1 1 0;\n");
    json s = json::parse(run("solve " + two).out);
    EXPECT_EQ(s["winner"], json::array({0, 0}));
    EXPECT_EQ(s["k"], 2);
    EXPECT_EQ(run("solve " + two + " --max-k 0").code, 2);
    EXPECT_EQ(run("solve " + two + " --engine magic").code, 1);
}

TEST_F(Cli, SolveBandedAgreesWithZielonka) {
    std::string g = path("b.pg");
    ASSERT_EQ(run("gen game --model 'banded(2)' --n 20 --seed 5 --max-priority 5 -o " + g).code, 0);
    CliRun r = run("solve " + g + " --engine both --emit-frontiers " + path("fr.json"));
    ASSERT_EQ(r.code, 0);
    json j = json::parse(r.out);
    EXPECT_TRUE(j["agree"].get<bool>());
    EXPECT_EQ(j["even"].size() + j["odd"].size(), 20U);
    std::ifstream in(path("fr.json"));
    json fr = json::parse(in);
    EXPECT_EQ(fr["k"], j["k"]);
    EXPECT_FALSE(fr["nodes"].empty());
}

TEST_F(Cli, MalformedInputsExitOne) {
    CliRun bad = run("solve " + file("bad.pg", "parity 1;\n0 x 0 0;\n"), true);
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("line 2"), std::string::npos) << bad.out;
    EXPECT_EQ(run("solve " + file("dead.pg", "parity 1;\n0 0 0 1;\n1 1 1 ;\n")).code, 1);
    EXPECT_EQ(run("width " + file("bad.txt", "3 5\n0 1\n")).code, 1);
    EXPECT_EQ(run("width " + path("missing.txt")).code, 1);
    EXPECT_EQ(run("").code, 1);
}

TEST_F(Cli, GeneratorsAreDeterministic) {
    CliRun a = run("gen game --model 'erdos(0.3)' --n 9 --seed 11");
    CliRun b = run("gen game --model 'erdos(0.3)' --n 9 --seed 11");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, run("gen game --model 'erdos(0.3)' --n 9 --seed 12").out);
    EXPECT_EQ(parse_pgsolver(a.out).size(), 9);
}

TEST_F(Cli, OracleCheck) {
    CliRun ok = run("oracle-check --seed 3 --samples 40");
    ASSERT_EQ(ok.code, 0) << ok.out;
    json j = json::parse(ok.out);
    EXPECT_TRUE(j["ok"].get<bool>());
    for (const char* s : {"uncrossing", "width", "frontier", "solver"}) EXPECT_GT(j["suites"][s]["checked"].get<int>(), 0) << s;

    CliRun bad = run("oracle-check --seed 3 --samples 40 --inject-fault outcome-leq");
    EXPECT_EQ(bad.code, 3);
    EXPECT_GT(json::parse(bad.out)["suites"]["frontier"]["mismatches"].get<int>(), 0);

    CliRun again = run("oracle-check --seed 3 --samples 40");
    EXPECT_EQ(again.out, ok.out);

    CliRun larger = run("oracle-check --scale n=8 --samples 15 --time-budget 60");
    EXPECT_EQ(larger.code, 0);
    EXPECT_EQ(json::parse(larger.out)["scale"], 8);
    EXPECT_EQ(run("oracle-check --scale 8").code, 1);

    CliRun cut = run("oracle-check --samples 100000 --time-budget 0.5");
    EXPECT_EQ(cut.code, 0);
    EXPECT_TRUE(json::parse(cut.out)["budget_exhausted"].get<bool>());
}
