#include "support.hpp"

#include <gtest/gtest.h>

using namespace xtest;

namespace
{
    const char *kMinimal = R"(
name: mini
chains:
  - id: a
    contracts:
      - {id: token, type: token, balances: {alice: 5}}
  - id: b
    contracts:
      - {id: token, type: token, balances: {bob: 5}}
bridges:
  - link: [a, b]
transactions:
  - id: 1
    proposer: a
    actions:
      - {id: 1, target: a/token, method: transfer, params: ["alice", "alice", 1]}
)";

    std::string with(const std::string &from, const std::string &to)
    {
        std::string s = kMinimal;
        const auto pos = s.find(from);
        EXPECT_NE(pos, std::string::npos) << from;
        s.replace(pos, from.size(), to);
        return s;
    }

    std::string error_of(const std::string &text)
    {
        try
        {
            parse_scenario(text, "t.yaml");
        }
        catch (const std::exception &e)
        {
            return e.what();
        }
        return {};
    }
} // namespace

TEST(Load, SwapShape)
{
    const Scenario sc = bundled("swap");
    EXPECT_EQ(sc.chains.size(), 2u);
    EXPECT_EQ(sc.bridges.size(), 2u);
    ASSERT_EQ(sc.txns.size(), 1u);
    EXPECT_EQ(sc.txns[0].actions.size(), 2u);
    const World w = build_world(sc, 0);
    EXPECT_EQ(w.adapters.size(), 2u);
}

TEST(Load, ThreeExchangeShape)
{
    const Scenario sc = bundled("three-exchange");
    EXPECT_EQ(sc.chains.size(), 3u);
    const auto chains = sc.txns.at(0).chains();
    EXPECT_EQ(chains.size(), 3u);
    EXPECT_EQ(sc.txns[0].proposer.name, "fantom");
}

TEST(Load, EveryBundledScenarioParses)
{
    for (const char *name : {"swap", "swap-lockfail", "swap-updatefail", "three-exchange", "symmetric-conflict",
                             "adversary-forge", "adversary-drop", "notify-rcall"})
        EXPECT_NO_THROW(bundled(name)) << name;
}

TEST(Load, ValuesKeepTheirTypes)
{
    const Scenario sc = parse_scenario(with(R"(["alice", "alice", 1])", R"(["7", true, 7, ()])"));
    EXPECT_EQ(sc.txns[0].actions[0].params, (ValueList{bytes("7"), true, 7, Unit{}}));
}

TEST(Load, UnknownReferencesAreNamed)
{
    EXPECT_NE(error_of(with("target: a/token", "target: a/ghost")).find("a/ghost"), std::string::npos);
    EXPECT_NE(error_of(with("proposer: a", "proposer: zz")).find("zz"), std::string::npos);
    EXPECT_NE(error_of(with("link: [a, b]", "link: [a, c]")).find("'c'"), std::string::npos);
}

TEST(Load, MalformedInputCarriesLineNumbers)
{
    const std::string err = error_of(with("type: token, balances", "type: nft, balances"));
    EXPECT_NE(err.find("nft"), std::string::npos);
    EXPECT_NE(err.find("t.yaml:"), std::string::npos);
    EXPECT_FALSE(error_of("chains: [").empty());
    EXPECT_FALSE(error_of(with("name: mini", "name: mini\nstop: never")).empty());
    EXPECT_FALSE(error_of(with("link: [a, b]", "link: [a, b]\n    max_delay: 0")).empty());
}

TEST(Load, AdversaryCannotTargetHonestBridge)
{
    const std::string text = std::string(kMinimal) + "adversary:\n  - {tick: 1, kind: drop, bridge: a->b, msg: 1}\n";
    EXPECT_NE(error_of(text).find("targets honest bridge a->b"), std::string::npos);
}

TEST(Load, MissingFileIsParseError)
{
    EXPECT_THROW(load_scenario("/nonexistent/x.yaml"), ParseError);
}
