#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

Run cli(const std::string& args) {
    std::string cmd = std::string(RDCP_CLI_PATH) + " " + args + " 2>&1";
    Run r{-1, {}};
    FILE* p = popen(cmd.c_str(), "r");
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    r.status = pclose(p);
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("rdcp_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Cli, SimulateIsDeterministic) {
    auto a = scratch("sim_a"), b = scratch("sim_b");
    std::string args = "simulate --host complete:100 --dist 2:1 --until final --runs 3 --trajectory --seed 7 --out ";
    ASSERT_EQ(cli(args + a.string()).status, 0);
    ASSERT_EQ(cli(args + b.string() + " --threads 2").status, 0);
    for (auto f : {"summary.csv", "summary_stats.csv", "trajectory.csv"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    auto summary = slurp(a / "summary.csv");
    EXPECT_NE(summary.find("# seed=7"), std::string::npos);
    EXPECT_NE(summary.find("# host=complete:100"), std::string::npos);
    EXPECT_NE(summary.find("t,edges,unsat_frac,largest,susceptibility"), std::string::npos);
}

TEST(Cli, ParityErrorSurfaced) {
    auto r = cli("simulate --host regular:5:3 --out " + scratch("parity").string());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.out.find("must be even"), std::string::npos) << r.out;
}

TEST(Cli, BadDistributionDiagnosed) {
    auto r = cli("simulate --dist 3:x --out " + scratch("baddist").string());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.out.find("3:x"), std::string::npos) << r.out;
}

TEST(Cli, CriticalRows) {
    auto out = scratch("critical");
    auto r = cli("critical --dists 3:1 8:1 12:1 --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.out;
    auto csv = slurp(out / "critical.csv");
    EXPECT_NE(csv.find("dist,t_hat_c,t_c,theta,delta,I,J,asymptotic_ref,ratio,flags,mu"), std::string::npos);
    EXPECT_NE(csv.find("below_resolution"), std::string::npos);
    EXPECT_NE(csv.find("3:1,1.24378463"), std::string::npos) << csv;
}

TEST(Cli, CompareRadiusZeroIsExact) {
    auto out = scratch("compare0");
    auto r = cli("compare --host complete:500 --dist 3:1 --t 0.75 --R 0 --samples 2000 --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.out;
    auto csv = slurp(out / "compare.csv");
    EXPECT_NE(csv.find("\n0,2000,0\n"), std::string::npos) << csv;
}

TEST(Cli, CompareStepIndexed) {
    auto out = scratch("compare_s");
    auto r = cli("compare --host complete:10000 --dist 3:1 --s 0.3 --R 1 --samples 100000 --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.out;
    std::ifstream in(out / "compare.csv");
    double tv1 = -1.0;
    for (std::string line; std::getline(in, line);)
        if (line.rfind("1,", 0) == 0) tv1 = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_GE(tv1, 0.0);
    EXPECT_LT(tv1, 0.03);
}

TEST(Cli, RadiusGuard) {
    auto r = cli("compare --R 5 --out " + scratch("guard").string());
    EXPECT_NE(r.status, 0);
}

TEST(Cli, SpectralLadder) {
    auto out = scratch("spectral");
    auto r = cli("spectral --dist 3:1 --t-hats 0.5 1 1.5 --grid 400 --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.out;
    EXPECT_NE(slurp(out / "spectral.csv").find("t_hat,mu,iters,residual"), std::string::npos);
}
