#include <xchain/xchain.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace
{
    namespace fs = std::filesystem;
    using namespace xchain;

    enum Exit : int
    {
        kOk = 0,
        kViolation = 1,
        kConfig = 2,
        kBudget = 3,
    };

    fs::path resolve_scenario(const std::string &name)
    {
        const fs::path direct{name};
        if (fs::exists(direct))
            return direct;
        for (const fs::path &p : {fs::path(XCHAIN_SCENARIO_DIR) / name, fs::path(XCHAIN_SCENARIO_DIR) / (name + ".yaml")})
            if (fs::exists(p))
                return p;
        throw ValidationError("no scenario named '" + name + "'");
    }

    struct Common
    {
        std::string scenario;
        std::optional<std::uint64_t> seed;
        std::string lockOrder;
        int verbose = 0;
    };

    RunOptions options(const Common &c, bool interference = false)
    {
        RunOptions o;
        o.seed = c.seed;
        o.interference = interference;
        if (c.lockOrder == "canonical")
            o.lockOrder = LockOrderMode::Canonical;
        else if (c.lockOrder == "declared")
            o.lockOrder = LockOrderMode::Declared;
        return o;
    }

    void write_text(const std::string &path, const std::string &text)
    {
        if (path.empty() || path == "-")
        {
            std::cout << text;
            return;
        }
        std::ofstream out(path);
        if (!out)
            throw ValidationError("cannot write " + path);
        out << text;
    }

    int report(const CheckReport &rep, int verbose)
    {
        for (const auto &v : rep.verdicts)
        {
            if (verbose > 0 || !v.pass)
                std::cout << v.to_lines();
            else
                std::cout << "verdict checker=" << v.checker << " pass=1\n";
        }
        if (rep.budgetExceeded)
            std::cout << "verdict checker=strict-serializability skipped=budget why=" << escape(*rep.budgetExceeded)
                      << "\n";
        if (!rep.pass())
            return kViolation;
        return rep.budgetExceeded ? kBudget : kOk;
    }

    /// Per-chain message and transaction counts plus per-transaction outcomes.
    std::string counts_signature(const MetricsReport &m)
    {
        std::string s;
        for (const auto &[id, c] : m.perChain)
            s += id.name + ":" + std::to_string(c.xcMsgs) + "/" + std::to_string(c.txCount) + ";";
        for (const auto &[tx, t] : m.perTx)
            s += std::to_string(tx) + ":" + t.outcome + t.reason + ";";
        return s;
    }

    int cmd_run(const Common &c, const std::string &out)
    {
        const Scenario sc = load_scenario(resolve_scenario(c.scenario));
        const RunResult res = run(sc, options(c));
        write_text(out, res.trace.serialize());
        std::ostream &summary = out.empty() || out == "-" ? std::cerr : std::cout;
        const MetricsReport m = extract_metrics(res.trace);
        for (const auto &[tx, t] : m.perTx)
            summary << "tx " << tx << " " << t.outcome << (t.reason.empty() ? "" : "(" + t.reason + ")") << "\n";
        if (c.verbose > 0)
            summary << sc.name << ": ticks=" << res.ticks << " quiesced=" << res.quiesced << "\n" << m.table();
        if (res.fatal)
        {
            std::cerr << "fatal: " << *res.fatal << "\n";
            return kViolation;
        }
        return kOk;
    }

    int cmd_check(const Common &c, std::size_t budget)
    {
        const Scenario sc = load_scenario(resolve_scenario(c.scenario));
        const RunResult res = run(sc, options(c));
        if (c.verbose > 1)
            std::cerr << res.trace.serialize();
        const int code = report(check_all(res.trace, res.txns, res.initial, res.world.chains, budget), c.verbose);
        if (res.fatal)
        {
            std::cerr << "fatal: " << *res.fatal << "\n";
            return kViolation;
        }
        return code;
    }

    int cmd_metrics(const Common &c)
    {
        const Scenario sc = load_scenario(resolve_scenario(c.scenario));
        std::cout << extract_metrics(run(sc, options(c)).trace).table();
        return kOk;
    }

    int cmd_sweep(const Common &c, std::uint64_t seeds, std::size_t budget)
    {
        const Scenario sc = load_scenario(resolve_scenario(c.scenario));
        const std::uint64_t base = c.seed.value_or(sc.seed);
        std::uint64_t passed = 0;
        std::uint64_t skipped = 0;
        std::optional<std::string> signature;
        bool stable = true;
        // Each seed runs plain and, when the scenario defines any, with interference.
        const bool withInterference = !sc.interference.templates.empty() && sc.interference.count > 0;
        for (std::uint64_t i = 0; i < seeds; ++i)
        {
            Common one = c;
            one.seed = base + i;
            bool ok = true;
            for (const bool inter : {false, true})
            {
                if (inter && !withInterference)
                    continue;
                const RunResult res = run(sc, options(one, inter));
                const CheckReport rep = check_all(res.trace, res.txns, res.initial, res.world.chains, budget);
                ok = ok && rep.pass() && !res.fatal;
                skipped += rep.budgetExceeded ? 1 : 0;
                if ((!rep.pass() || res.fatal) && c.verbose > 0)
                {
                    std::cout << "seed " << base + i << (inter ? " (interference)" : "") << " failed\n";
                    for (const auto &v : rep.verdicts)
                        if (!v.pass)
                            std::cout << v.to_lines();
                }
                const std::string sig = counts_signature(extract_metrics(res.trace));
                if (!signature)
                    signature = sig;
                else if (*signature != sig)
                    stable = false;
            }
            passed += ok ? 1 : 0;
        }
        std::cout << passed << "/" << seeds << " checks passed; counts "
                  << (stable ? "stable" : "vary");
        if (skipped)
            std::cout << "; serializability skipped on " << skipped << " (budget)";
        std::cout << "\n";
        if (passed != seeds)
            return kViolation;
        return skipped ? kBudget : kOk;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Deterministic simulator and checkers for cross-chain transactions"};
    app.require_subcommand(1);

    Common common;
    std::string out;
    std::size_t budget = 14;
    std::uint64_t seeds = 100;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--scenario", common.scenario, "Scenario file or bundled scenario name")->required();
        sub->add_option("--seed", common.seed, "Override the scenario seed");
        sub->add_option("--lock-order", common.lockOrder, "Lock ordering")
            ->check(CLI::IsMember({"canonical", "declared"}));
        sub->add_flag("-v,--verbose", common.verbose, "More output (-vv for the trace)");
    };

    auto *runCmd = app.add_subcommand("run", "Simulate a scenario and write its trace");
    add_common(runCmd);
    runCmd->add_option("--out", out, "Trace output file (default stdout)");

    auto *checkCmd = app.add_subcommand("check", "Run a scenario and all checkers on its trace");
    add_common(checkCmd);
    checkCmd->add_option("--budget", budget, "Max state-mutating events for the serializability search");

    auto *metricsCmd = app.add_subcommand("metrics", "Per-chain message and transaction counts");
    add_common(metricsCmd);

    auto *sweepCmd = app.add_subcommand("sweep", "Run and check many seeds");
    add_common(sweepCmd);
    sweepCmd->add_option("--seeds", seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber);
    sweepCmd->add_option("--budget", budget, "Max state-mutating events for the serializability search");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try
    {
        if (runCmd->parsed())
            return cmd_run(common, out);
        if (checkCmd->parsed())
            return cmd_check(common, budget);
        if (metricsCmd->parsed())
            return cmd_metrics(common);
        return cmd_sweep(common, seeds, budget);
    }
    catch (const ValidationError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    }
    catch (const ParseError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    }
    catch (const CommError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    }
}
