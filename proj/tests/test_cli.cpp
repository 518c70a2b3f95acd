#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "pathlt/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const char* exe = std::getenv("PATHLT_CLI");
    Run r;
    if (!exe) return r;
    std::string cmd = std::string("env -u PATHLT_OUT ") + exe + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string last_line(const std::string& s) {
    auto t = s;
    while (!t.empty() && (t.back() == '\n' || t.back() == '\r')) t.pop_back();
    return t.substr(t.find_last_of('\n') + 1);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        if (!std::getenv("PATHLT_CLI")) GTEST_SKIP() << "PATHLT_CLI not set";
    }
};

}  // namespace

TEST_F(Cli, QvOfZigzag) {
    auto r = run("qv --path zigzag --partition dyadic:4 --t 1");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(last_line(r.out), "1,0.25");
    EXPECT_NE(r.out.find("\r\n"), std::string::npos);
}

TEST_F(Cli, TanakaResidualZero) {
    auto r = run("--format json tanaka --f \"abs(u-0.5)\" --path zigzag --partition \"0,0.5,1\" --assert");
    EXPECT_EQ(r.code, 0);
    auto j = pathlt::json::parse(r.out);
    EXPECT_EQ(j["result"]["residual"].get<double>(), 0.0);
}

TEST_F(Cli, ConstantPath) {
    auto r = run("qv --path constant:3");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(last_line(r.out), "1,0");
}

TEST_F(Cli, ExitCodes) {
    auto tmp = fs::temp_directory_path() / "pathlt_cli_bad.json";
    std::ofstream(tmp) << R"({"path": "zigzag", "unknown_key": 1})";
    EXPECT_EQ(run("qv --config " + tmp.string()).code, 1);
    EXPECT_EQ(run("qv --path not-a-path").code, 1);
    EXPECT_EQ(run("qv --partition dyadic:x").code, 1);
    EXPECT_EQ(run("nosuchcommand").code, 1);
    // an impossible tolerance makes the checked identity fail
    EXPECT_EQ(run("tanaka --path bridge:1 --partition dyadic:6 --tol -1 --assert").code, 2);
}

TEST_F(Cli, ConfigFileAndRecordedDefaults) {
    auto tmp = fs::temp_directory_path() / "pathlt_cli_cfg.json";
    std::ofstream(tmp) << R"({"path": "bridge:4", "partition": "dyadic:6"})";
    auto r = run("--format json ltime --config " + tmp.string() + " --u 0.1");
    ASSERT_EQ(r.code, 0);
    auto j = pathlt::json::parse(r.out);
    EXPECT_EQ(j["settings"]["path"], "bridge:4");
    EXPECT_EQ(j["settings"]["t"], 1.0);
    EXPECT_EQ(j["settings"]["p"], 2.0);
    EXPECT_DOUBLE_EQ(j["result"]["mass"].get<double>(), j["result"]["qv"].get<double>());
}

TEST_F(Cli, OutputsAreByteIdentical) {
    auto a = fs::temp_directory_path() / "pathlt_cli_a", b = fs::temp_directory_path() / "pathlt_cli_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const std::string args = " mc --seeds 1-3 --stages 6,8 --levels 0,0.25 --oracle-eps 0.001";
    ASSERT_EQ(run("--out " + a.string() + args).code, 0);
    ASSERT_EQ(run("--out " + b.string() + args).code, 0);
    EXPECT_EQ(slurp(a / "mc.csv"), slurp(b / "mc.csv"));
    EXPECT_EQ(slurp(a / "mc.json"), slurp(b / "mc.json"));
    auto side = pathlt::json::parse(slurp(a / "mc.json"));
    EXPECT_TRUE(side["settings"].contains("checkpoint_depth"));
    EXPECT_FALSE(slurp(a / "mc.csv").empty());
}

TEST_F(Cli, EverySubcommandRuns) {
    for (std::string c : {"crossings --eps 0.0625", "ito --f u^4", "occupation", "cov --phi exp:1 --u 0",
                          "timechange --tau power:2 --assert", "mollify --n 4,16", "cantor --n 3", "blowup --budget 10",
                          "forge-qv --budget 20", "levy", "selftest --only 9"})
        EXPECT_EQ(run(c).code, 0) << c;
}
