#include "support.hpp"

#include <gtest/gtest.h>

using namespace xtest;

namespace
{
    const Address kOut = at("a/adapter.b");
    const Address kAlice = at("a/alice");
    const Address kCounter = at("b/counter");
    const Address kToken = at("b/token");

    World pair_world(std::uint64_t seed = 1, std::uint64_t maxDelay = 3)
    {
        World w;
        w.rng = Rng(seed);
        add_chain(w, ChainId{"a"});
        Chain &b = add_chain(w, ChainId{"b"});
        ContractConfig ctr;
        ctr.local = "counter";
        ctr.type = "counter";
        add_contract(b, ctr);
        ContractConfig tok;
        tok.local = "token";
        tok.type = "token";
        tok.vars = token_balances({{"alice", 10}, {"bob", 0}});
        add_contract(b, tok);
        const BridgePolicy p{BridgePolicy::Mode::Honest, maxDelay, true};
        add_bridge(w, BridgeId{ChainId{"a"}, ChainId{"b"}, 0}, p);
        add_bridge(w, BridgeId{ChainId{"b"}, ChainId{"a"}, 0}, p);
        return w;
    }

    /// Seals the current tick, then runs deliveries for `ticks` more ticks.
    void pump(World &w, Tick ticks)
    {
        for (Tick i = 0; i <= ticks; ++i)
        {
            if (i > 0)
            {
                ++w.clock;
                for (const auto &[id, b] : w.bridges)
                    deliver_due(w, id, adapter_recv);
                drain_resolved(w);
            }
            for (const auto &[id, c] : w.chains)
                seal(w, id);
        }
    }

    std::int64_t counter(const World &w)
    {
        return std::get<std::int64_t>(w.chains.at(ChainId{"b"}).contracts.at(kCounter).s.vars.at("count"));
    }

    std::vector<const TraceEvent *> invokes_of(const World &w, const Address &target, const std::string &method)
    {
        std::vector<const TraceEvent *> out;
        for (const auto &e : w.trace.events())
            if (e.kind == EventKind::Invoke && e.detail.at("target") == target.text() &&
                e.detail.at("method") == method)
                out.push_back(&e);
        return out;
    }
} // namespace

TEST(Notify, OneMessageOneNotification)
{
    World w = pair_world();
    notify(w, kOut, kAlice, Bytes{"hello"}, kCounter);
    pump(w, 5);
    EXPECT_EQ(count(w.trace, EventKind::Send), 1u);
    const auto calls = invokes_of(w, kCounter, "notification");
    ASSERT_EQ(calls.size(), 1u);
    EXPECT_EQ(parse_value_list(calls[0]->detail.at("params")),
              (ValueList{bytes("a/alice"), bytes("a"), bytes("hello")}));
    EXPECT_EQ(counter(w), 1);
}

TEST(Notify, MissingDestinationFailsAtPeerWithoutCrash)
{
    World w = pair_world();
    notify(w, kOut, kAlice, Bytes{"x"}, at("b/ghost"));
    EXPECT_NO_THROW(pump(w, 5));
    const auto calls = invokes_of(w, at("b/ghost"), "notification");
    ASSERT_EQ(calls.size(), 1u);
    EXPECT_EQ(get_outcome(calls[0]->detail).failure, Failure::UnknownTarget);
}

TEST(Notify, TwoNotifiesBothArrive)
{
    World w = pair_world(4);
    notify(w, kOut, kAlice, Bytes{"1"}, kCounter);
    notify(w, kOut, kAlice, Bytes{"2"}, kCounter);
    pump(w, 5);
    EXPECT_EQ(counter(w), 2);
    EXPECT_EQ(count(w.trace, EventKind::Recv), 2u);
}

TEST(Notify, DestinationMustBeOnPeer)
{
    World w = pair_world();
    try
    {
        notify(w, kOut, kAlice, Bytes{"x"}, at("a/counter"));
        FAIL() << "expected CommError";
    }
    catch (const CommError &e)
    {
        EXPECT_EQ(e.kind, CommError::Kind::WrongChain);
    }
}

TEST(Anotify, PendingThenDelivered)
{
    World w = pair_world();
    const Seq s = anotify(w, kOut, kAlice, Bytes{"x"}, kCounter);
    EXPECT_EQ(query(w, kOut, s).status, FutureStatus::Pending);
    pump(w, 10);
    EXPECT_EQ(query(w, kOut, s).status, FutureStatus::Delivered);
    EXPECT_EQ(count(w.trace, EventKind::Send), 2u);
}

TEST(Anotify, ConcurrentAcksMatchBySeq)
{
    bool sawReversedAcks = false;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        World w = pair_world(seed);
        const Seq s1 = anotify(w, kOut, kAlice, Bytes{"one"}, kCounter);
        const Seq s2 = anotify(w, kOut, kAlice, Bytes{"two"}, kCounter);
        pump(w, 12);

        // Expected result per seq: the notification outcome for that seq's data.
        std::map<std::string, Outcome> byData;
        for (const auto *e : invokes_of(w, kCounter, "notification"))
            byData[std::get<Bytes>(parse_value_list(e->detail.at("params"))[2]).data] = get_outcome(e->detail);
        const Future f1 = query(w, kOut, s1);
        const Future f2 = query(w, kOut, s2);
        ASSERT_EQ(f1.status, FutureStatus::Delivered);
        ASSERT_EQ(f2.status, FutureStatus::Delivered);
        ASSERT_EQ(f1.result, byData.at("one")) << "seed " << seed;
        ASSERT_EQ(f2.result, byData.at("two")) << "seed " << seed;

        std::vector<Seq> ackOrder;
        for (const auto &e : w.trace.events())
            if (e.kind == EventKind::Future && e.detail.at("state") == "Delivered")
                ackOrder.push_back(e.detail.u64("seq"));
        sawReversedAcks = sawReversedAcks || ackOrder == std::vector<Seq>{s2, s1};
    }
    EXPECT_TRUE(sawReversedAcks);
}

TEST(Rcall, TransferCompletesAndUpdatesRemote)
{
    World w = pair_world();
    const Seq s = rcall(w, kOut, kAlice, kToken, "transfer", {bytes("alice"), bytes("bob"), 5});
    EXPECT_EQ(query(w, kOut, s).status, FutureStatus::Pending);
    pump(w, 10);
    const Future f = query(w, kOut, s);
    EXPECT_EQ(f.status, FutureStatus::Completed);
    EXPECT_TRUE(f.result.ok());
    EXPECT_EQ(balance(w.chains.at(ChainId{"b"}), "token", "bob"), 5);
    EXPECT_EQ(count(w.trace, EventKind::Send), 2u);
}

TEST(Rcall, LockedRemoteGivesFailureResult)
{
    World w = pair_world();
    Chain &b = w.chains.at(ChainId{"b"});
    ASSERT_TRUE(lock(b, b.executor, kToken).ok());
    const Seq s = rcall(w, kOut, kAlice, kToken, "transfer", {bytes("alice"), bytes("bob"), 5});
    pump(w, 10);
    const Future f = query(w, kOut, s);
    EXPECT_EQ(f.status, FutureStatus::Completed);
    EXPECT_EQ(f.result.failure, Failure::LockedByOther);
    EXPECT_EQ(count(w.trace, EventKind::Recv), 2u);
}

TEST(Rcall, UnknownMethodStillAcks)
{
    World w = pair_world();
    const Seq s = rcall(w, kOut, kAlice, kToken, "burn", {});
    pump(w, 10);
    EXPECT_EQ(query(w, kOut, s).result.failure, Failure::UnknownMethod);
    bool ackSent = false;
    for (const auto &e : w.trace.events())
        if (e.kind == EventKind::Send && e.detail.at("payload") == "ack|" + std::to_string(s) + "|0|UnknownMethod")
            ackSent = true;
    EXPECT_TRUE(ackSent);
}

TEST(Query, ForeignFutureIsUnknown)
{
    World w = pair_world();
    try
    {
        (void)query(w, kOut, 42);
        FAIL() << "expected CommError";
    }
    catch (const CommError &e)
    {
        EXPECT_EQ(e.kind, CommError::Kind::UnknownFuture);
    }
    EXPECT_THROW((void)query(w, at("a/adapter.z"), 1), CommError);
}

TEST(AdapterRecv, UnknownSeqIsAnAnomaly)
{
    World w = pair_world();
    const Seq s = anotify(w, kOut, kAlice, Bytes{"x"}, kCounter);
    const auto before = w.adapters.at(kOut).futures;
    adapter_recv(w, BridgeMessage{77, BridgeId{ChainId{"b"}, ChainId{"a"}, 0}, at("b/adapter.a"), kOut,
                                  AckPayload{s + 10, Outcome::success()}, 0});
    ASSERT_EQ(w.trace.events().back().kind, EventKind::Anomaly);
    EXPECT_EQ(w.trace.events().back().detail.at("what"), "unknown-seq");
    EXPECT_EQ(w.adapters.at(kOut).futures.size(), before.size());
    EXPECT_EQ(w.adapters.at(kOut).futures.at(s).status, FutureStatus::Pending);
}

TEST(Forgery, EveryNotificationTracesBackToOneCall)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        World w = pair_world(seed, 4);
        Rng rng(seed + 1000);
        std::multiset<std::string> issued;
        for (Tick t = 0; t < 6; ++t)
        {
            w.clock = t;
            for (const auto &[id, b] : w.bridges)
                deliver_due(w, id, adapter_recv);
            drain_resolved(w);
            const auto n = rng.below(3);
            for (std::uint64_t i = 0; i < n; ++i)
            {
                const std::string data = "m" + std::to_string(t) + "." + std::to_string(i);
                issued.insert(data);
                if (rng.below(2))
                    notify(w, kOut, kAlice, Bytes{data}, kCounter);
                else
                    anotify(w, kOut, kAlice, Bytes{data}, kCounter);
            }
            for (const auto &[id, c] : w.chains)
                seal(w, id);
        }
        pump(w, 12);
        std::multiset<std::string> received;
        for (const auto *e : invokes_of(w, kCounter, "notification"))
            received.insert(std::get<Bytes>(parse_value_list(e->detail.at("params"))[2]).data);
        ASSERT_EQ(received, issued) << "seed " << seed;
        for (const auto &[s, f] : w.adapters.at(kOut).futures)
            ASSERT_EQ(f.status, FutureStatus::Delivered);
        ASSERT_TRUE(check_secure_transfer(w.trace).pass);
    }
}
