#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <sys/wait.h>

namespace
{
    struct Result
    {
        int code = -1;
        std::string out;
    };

    Result cli(const std::string &args)
    {
        const std::string cmd = std::string(XCHAIN_CLI_PATH) + " " + args + " 2>&1";
        Result r;
        std::unique_ptr<FILE, int (*)(FILE *)> pipe(popen(cmd.c_str(), "r"), pclose);
        std::array<char, 4096> buf{};
        while (const auto n = fread(buf.data(), 1, buf.size(), pipe.get()))
            r.out.append(buf.data(), n);
        const int status = pclose(pipe.release());
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        return r;
    }

    std::filesystem::path temp(const std::string &name)
    {
        return std::filesystem::temp_directory_path() / ("xchain_cli_" + name);
    }
} // namespace

TEST(Cli, RunPrintsTraceAndOutcome)
{
    const Result r = cli("run --scenario swap --seed 3");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("kind=OutcomeEvt chain=fantom tx=1 outcome=Committed"), std::string::npos);
    EXPECT_NE(r.out.find("tx 1 Committed"), std::string::npos);
}

TEST(Cli, RunWritesTraceFile)
{
    const auto path = temp("trace.txt");
    const Result r = cli("run --scenario swap-lockfail --out " + path.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("tx 1 Aborted(LockConflict)"), std::string::npos);
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first.rfind("tick=0 kind=", 0), 0u) << first;
    std::filesystem::remove(path);
}

TEST(Cli, SameSeedSameOutput)
{
    EXPECT_EQ(cli("run --scenario three-exchange --seed 42").out, cli("run --scenario three-exchange --seed 42").out);
}

TEST(Cli, CheckPassesHonestRun)
{
    const Result r = cli("check --scenario swap --seed 5");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("verdict checker=secure-transfer pass=1"), std::string::npos);
    EXPECT_NE(r.out.find("verdict checker=strict-serializability pass=1"), std::string::npos);
}

TEST(Cli, CheckFlagsAdversaries)
{
    const Result forge = cli("check --scenario adversary-forge");
    EXPECT_EQ(forge.code, 1);
    EXPECT_NE(forge.out.find("property=SecureTransferSafety"), std::string::npos);
    const Result drop = cli("check --scenario adversary-drop");
    EXPECT_EQ(drop.code, 1);
    EXPECT_NE(drop.out.find("property=SecureTransferLiveness"), std::string::npos);
}

TEST(Cli, BudgetExitCode)
{
    const Result r = cli("check --scenario swap --budget 2");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("skipped=budget"), std::string::npos);
}

TEST(Cli, MetricsTable)
{
    const Result swap = cli("metrics --scenario swap");
    EXPECT_EQ(swap.code, 0);
    EXPECT_NE(swap.out.find("proposer 3 4 "), std::string::npos);
    EXPECT_NE(swap.out.find("participant 3 3 "), std::string::npos);
    const Result three = cli("metrics --scenario three-exchange");
    EXPECT_NE(three.out.find("proposer 6 4 "), std::string::npos);
}

TEST(Cli, Sweep)
{
    const Result r = cli("sweep --scenario swap --seeds 100");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "100/100 checks passed; counts stable\n");
}

TEST(Cli, LockOrderFlag)
{
    const Result r = cli("run --scenario symmetric-conflict --seed 2 --lock-order declared --out /dev/null");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("tx 1 Aborted(LockConflict)"), std::string::npos);
    EXPECT_NE(r.out.find("tx 2 Aborted(LockConflict)"), std::string::npos);
}

TEST(Cli, ConfigErrors)
{
    EXPECT_EQ(cli("run --scenario no-such-scenario").code, 2);
    EXPECT_EQ(cli("run").code, 2);
    EXPECT_EQ(cli("run --scenario swap --lock-order sideways").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
    const auto bad = temp("bad.yaml");
    std::ofstream(bad) << "name: x\nchains:\n  - id: a\n    contracts:\n      - {id: t, type: nft}\n";
    const Result r = cli("check --scenario " + bad.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("nft"), std::string::npos);
    std::filesystem::remove(bad);
}
