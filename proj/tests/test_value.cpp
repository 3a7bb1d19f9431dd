#include "support.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace xtest;

namespace
{
    Value random_value(Rng &rng)
    {
        switch (rng.below(4))
        {
        case 0:
            return Unit{};
        case 1: {
            const auto raw = rng.next();
            return static_cast<std::int64_t>(raw);
        }
        case 2:
            return rng.below(2) == 1;
        default: {
            std::string s;
            const auto n = rng.below(12);
            for (std::uint64_t i = 0; i < n; ++i)
                s.push_back(static_cast<char>(rng.below(256)));
            return Bytes{s};
        }
        }
    }
} // namespace

TEST(Value, CanonicalTextOfEachAlternative)
{
    EXPECT_EQ(to_text(Value{Unit{}}), "()");
    EXPECT_EQ(to_text(Value{std::int64_t{-42}}), "-42");
    EXPECT_EQ(to_text(Value{true}), "#t");
    EXPECT_EQ(to_text(Value{false}), "#f");
    EXPECT_EQ(to_text(bytes("a b|c")), "'a%20b%7Cc'");
    EXPECT_EQ(to_text(ValueList{1, bytes("x"), Unit{}}), "[1,'x',()]");
}

TEST(Value, EscapeLeavesOnlySafeCharacters)
{
    const std::string raw = "spaces and = | , ' \n\t%";
    const std::string e = escape(raw);
    for (char c : e)
        EXPECT_TRUE(xchain::detail::plain_char(c) || c == '%') << c;
    EXPECT_EQ(unescape(e), raw);
}

TEST(Value, IntegerExtremesRoundTrip)
{
    for (const std::int64_t v : {std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::max(),
                                 std::int64_t{0}, std::int64_t{-1}})
        EXPECT_EQ(parse_value(to_text(Value{v})), Value{v});
    EXPECT_THROW(parse_value("9223372036854775808"), ParseError);
    EXPECT_THROW(parse_value("-9223372036854775809"), ParseError);
}

TEST(Value, MalformedInputIsRejected)
{
    EXPECT_THROW(parse_value(""), ParseError);
    EXPECT_THROW(parse_value("-"), ParseError);
    EXPECT_THROW(parse_value("12a"), ParseError);
    EXPECT_THROW(parse_value("'%4'"), ParseError);
    EXPECT_THROW(parse_value_list("1,2"), ParseError);
    EXPECT_EQ(parse_value_list("[]"), ValueList{});
}

TEST(Value, RandomListsRoundTripThroughText)
{
    Rng rng(99);
    for (int i = 0; i < 2000; ++i)
    {
        ValueList vs;
        const auto n = rng.below(6);
        for (std::uint64_t j = 0; j < n; ++j)
            vs.push_back(random_value(rng));
        ASSERT_EQ(parse_value_list(to_text(vs)), vs) << to_text(vs);
    }
}

TEST(Ids, AddressAndBridgeText)
{
    const Address a = parse_address("fantom/token");
    EXPECT_EQ(a.chain.name, "fantom");
    EXPECT_EQ(a.local, "token");
    EXPECT_EQ(a.text(), "fantom/token");
    EXPECT_THROW(parse_address("token"), ParseError);
    EXPECT_THROW(parse_address("/token"), ParseError);
    EXPECT_THROW(parse_address("fantom/"), ParseError);

    const BridgeId b = parse_bridge_id("a->b#2");
    EXPECT_EQ(b.src.name, "a");
    EXPECT_EQ(b.dst.name, "b");
    EXPECT_EQ(b.tag, 2u);
    EXPECT_EQ(b.text(), "a->b#2");
    EXPECT_EQ(parse_bridge_id("a->b").text(), "a->b");
    EXPECT_THROW(parse_bridge_id("ab"), ParseError);
}

TEST(Ids, ChainOrderIsLexicographic)
{
    EXPECT_LT(ChainId{"fantom"}, ChainId{"mumbai"});
    EXPECT_LT(ChainId{"mumbai1"}, ChainId{"mumbai2"});
    EXPECT_LT(ChainId{"B"}, ChainId{"a"});
}

TEST(Trace, LineRoundTrip)
{
    TraceEvent e{12, EventKind::Invoke, ChainId{"fantom"}, {}};
    e.detail.set("caller", "fantom/alice").set("params", to_text(ValueList{bytes("x y"), 3})).set("ok", true);
    const std::string line = to_line(e);
    EXPECT_EQ(line, "tick=12 kind=Invoke chain=fantom caller=fantom/alice params=['x%20y',3] ok=1");
    EXPECT_EQ(parse_line(line), e);

    TraceEvent end{3, EventKind::End, std::nullopt, {}};
    end.detail.set("drained", true);
    EXPECT_EQ(parse_line(to_line(end)), end);
    EXPECT_THROW(parse_line("kind=End"), ParseError);
    EXPECT_THROW(parse_line("tick=1 kind=Nope"), ParseError);
}

TEST(Trace, SerializeParseIsIdentity)
{
    const auto res = run(bundled("swap"));
    EXPECT_EQ(Trace::parse(res.trace.serialize()), res.trace);
}

TEST(Rng, SameSeedSameStream)
{
    Rng a(5);
    Rng b(5);
    for (int i = 0; i < 100; ++i)
        ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, BelowStaysInRangeAndHitsEveryValue)
{
    Rng r(1);
    std::array<int, 7> seen{};
    for (int i = 0; i < 7000; ++i)
    {
        const auto x = r.below(7);
        ASSERT_LT(x, 7u);
        ++seen[x];
    }
    for (int c : seen)
        EXPECT_GT(c, 800);
}

TEST(Rng, ShuffleIsAPermutation)
{
    Rng r(3);
    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    r.shuffle(std::span<int>(v));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}));
}
