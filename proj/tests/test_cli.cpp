#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "ucs/experiment.hpp"
#include "ucs/signal_io.hpp"

using namespace ucs;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(UCS_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string out;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

// Drops the wall_time_ms column (index 10) from a result row.
std::string without_wall_time(const std::string& row) {
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (i != 10) out += cells[i] + ",";
    return out;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("ucs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ofstream(dir / "pw.json") << R"({"model": "piecewise_markov", "p": 0.05, "seed": 3})";
        std::ofstream(dir / "zero.json") << R"({"model": "iid_mixture", "p": 0.0})";
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string at(const std::string& name) const { return (dir / name).string(); }

    fs::path dir;
};

}  // namespace

TEST_F(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("no-such-command").code, 1);
    EXPECT_EQ(run("generate --n 10").code, 1);
    EXPECT_EQ(run("decode --config " + at("pw.json") + " --n 64 --m 8 --noise loud:3").code, 1);
}

TEST_F(Cli, RuntimeErrorsExitTwo) {
    EXPECT_EQ(run("estimate-id --signal " + at("missing.txt") + " --b 4").code, 2);
    std::ofstream(dir / "bad.txt") << "0.5\nnope\n";
    EXPECT_EQ(run("estimate-id --signal " + at("bad.txt") + " --b 4").code, 2);
}

TEST_F(Cli, GenerateIsDeterministicWithSidecar) {
    ASSERT_EQ(run("generate --config " + at("pw.json") + " --n 256 --seed 3 --out " + at("a.txt")).code, 0);
    ASSERT_EQ(run("generate --config " + at("pw.json") + " --n 256 --seed 3 --out " + at("b.txt")).code, 0);
    EXPECT_EQ(slurp(dir / "a.txt"), slurp(dir / "b.txt"));
    const auto x = read_signal(dir / "a.txt");
    EXPECT_EQ(x.size(), 256u);
    const Json meta = Json::parse(read_sidecar(dir / "a.txt"));
    EXPECT_EQ(meta["n"], 256);
    EXPECT_EQ(meta["source"]["model"], "piecewise_markov");
    EXPECT_EQ(meta["rng"], "mt19937_64/splitmix64-seeded");
    SourceSpec spec = source_from_json(meta["source"]);
    EXPECT_EQ(generate(spec, 256), x);
}

TEST_F(Cli, EstimateIdOnZeroSignal) {
    write_signal(dir / "z.txt", RealSignal(1000, 0.0));
    const auto r = run("estimate-id --signal " + at("z.txt") + " --b 4,6,8 --k 1");
    ASSERT_EQ(r.code, 0);
    const auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0].rfind("b,k,id_estimate", 0), 0u);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(std::stod(lines[i].substr(lines[i].rfind(',') + 1)), 0.0);
}

TEST_F(Cli, EstimateIdWithReference) {
    ASSERT_EQ(run("generate --config " + at("pw.json") + " --n 4096 --seed 1 --out " + at("s.txt")).code, 0);
    const auto r = run("estimate-id --signal " + at("s.txt") + " --b 8 --k 1 --reference " + at("pw.json"));
    ASSERT_EQ(r.code, 0);
    const auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_NE(lines[0].find("reference_id"), std::string::npos);
    EXPECT_NE(lines[0].find("gap"), std::string::npos);
}

TEST_F(Cli, DecodeConstantSourceAndDeterminism) {
    const std::string args = "decode --config " + at("zero.json") + " --n 64 --m 24 --seed 2 --sweeps 50 --out ";
    ASSERT_EQ(run(args + at("d1.csv")).code, 0);
    ASSERT_EQ(run(args + at("d2.csv")).code, 0);
    const auto a = lines_of(slurp(dir / "d1.csv"));
    const auto b = lines_of(slurp(dir / "d2.csv"));
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0], result_csv_header);
    EXPECT_EQ(without_wall_time(a[1]), without_wall_time(b[1]));
    std::stringstream ss(a[1]);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    const double err = std::stod(cells[7]);
    const int bits = std::stoi(cells[2]);
    EXPECT_LT(err, std::ldexp(1.0, -bits) + 1e-6);
}

TEST_F(Cli, MeasureThenDecodeFromFiles) {
    ASSERT_EQ(run("generate --config " + at("pw.json") + " --n 64 --seed 4 --out " + at("x.txt")).code, 0);
    ASSERT_EQ(run("measure --signal " + at("x.txt") + " --m 24 --seed 9 --noise fixed:0.01 --out " + at("y.txt"))
                  .code,
              0);
    EXPECT_EQ(read_signal(dir / "y.txt").size(), 24u);
    const Json meta = Json::parse(read_sidecar(dir / "y.txt"));
    EXPECT_EQ(meta["m"], 24);
    EXPECT_EQ(meta["n"], 64);
    const auto r = run("decode --measurements " + at("y.txt") + " --signal " + at("x.txt") +
                       " --sweeps 20 --restarts 1 --xhat-out " + at("xh.txt") + " --out " + at("r.csv"));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(read_signal(dir / "xh.txt").size(), 64u);
    EXPECT_EQ(lines_of(slurp(dir / "r.csv")).size(), 2u);
    const auto l1 = run("l1-baseline --measurements " + at("y.txt") + " --signal " + at("x.txt") + " --xhat-out " +
                        at("l1.txt"));
    EXPECT_EQ(l1.code, 0);
    EXPECT_EQ(read_signal(dir / "l1.txt").size(), 64u);
}

TEST_F(Cli, ExperimentWritesOneRowPerCell) {
    std::ofstream(dir / "plan.json") << R"({
        "source": {"model": "piecewise_markov", "p": 0.05},
        "n_grid": [32], "m_grid": [8, 16], "trials": 2, "seed": 1,
        "decoder": {"sweeps": 10, "restarts": 1}
    })";
    ASSERT_EQ(run("experiment --plan " + at("plan.json") + " --out " + at("e.csv")).code, 0);
    const auto lines = lines_of(slurp(dir / "e.csv"));
    EXPECT_EQ(lines.size(), 5u);
}

TEST_F(Cli, ChecksReportSuccess) {
    EXPECT_EQ(run("lz-check --config " + at("pw.json") + " --n 4096 --b 1 --trials 3").code, 0);
    const auto chi = run("chi2-check --m 10 --tau 0.3 --draws 20000 --seed 1");
    EXPECT_EQ(chi.code, 0);
    EXPECT_FALSE(chi.out.empty());
}

TEST_F(Cli, DefaultsPrintsJson) {
    const auto r = run("defaults --n 256 --r 1.5");
    ASSERT_EQ(r.code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["b"], 5);
    EXPECT_EQ(j["k"], 1);
    EXPECT_DOUBLE_EQ(j["lambda"].get<double>(), 512.0);
    EXPECT_EQ(run("defaults --n 8 --r 1.5").code, 2);
}
