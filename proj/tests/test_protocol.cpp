#include "support.hpp"

#include <gtest/gtest.h>

using namespace xtest;

namespace
{
    const Address kExec = at("c/executor");

    World one_chain()
    {
        World w;
        Chain &c = add_chain(w, ChainId{"c"});
        for (const char *name : {"t1", "t2"})
        {
            ContractConfig cfg;
            cfg.local = name;
            cfg.type = "token";
            cfg.vars = token_balances({{"alice", 10}, {"bob", 0}});
            cfg.trusted.insert(at("c/other"));
            add_contract(c, cfg);
        }
        return w;
    }

    Outcome entry(World &w, const std::string &method, ValueList params, const Address &caller = kExec)
    {
        return dispatch_invoke(w, ChainId{"c"}, caller, std::nullopt, kExec, method, params, w.recorder());
    }

    const Contract &contract(const World &w, const std::string &local)
    {
        return w.chains.at(ChainId{"c"}).contracts.at(Address{ChainId{"c"}, local});
    }

    std::vector<const TraceEvent *> events(const Trace &t, EventKind kind)
    {
        std::vector<const TraceEvent *> out;
        for (const auto &e : t.events())
            if (e.kind == kind)
                out.push_back(&e);
        return out;
    }

    std::size_t sends_from(const Trace &t, const std::string &chain)
    {
        std::size_t n = 0;
        for (const auto *e : events(t, EventKind::Send))
            n += e->chain->name == chain ? 1 : 0;
        return n;
    }
} // namespace

TEST(LockScope, LocksEverythingInOrder)
{
    World w = one_chain();
    EXPECT_TRUE(entry(w, "lock_scope", {1, bytes("c/t1"), bytes("c/t2")}).ok());
    for (const char *n : {"t1", "t2"})
    {
        EXPECT_TRUE(contract(w, n).locked);
        EXPECT_EQ(*contract(w, n).lockedBy, kExec);
        EXPECT_EQ(*contract(w, n).checkpoint, contract(w, n).s);
    }
    EXPECT_EQ(w.executors.at(kExec).heldLocks.at(1).size(), 2u);
}

TEST(LockScope, ConflictReleasesPartialLocks)
{
    World w = one_chain();
    ASSERT_TRUE(lock(w.chains.at(ChainId{"c"}), at("c/other"), at("c/t2")).ok());
    EXPECT_EQ(entry(w, "lock_scope", {1, bytes("c/t1"), bytes("c/t2")}).failure, Failure::AlreadyLocked);
    EXPECT_FALSE(contract(w, "t1").locked);
    EXPECT_EQ(*contract(w, "t2").lockedBy, at("c/other"));
    EXPECT_FALSE(w.executors.at(kExec).heldLocks.contains(1));
}

TEST(LockScope, EmptyScopeIsTrivial)
{
    World w = one_chain();
    EXPECT_EQ(entry(w, "lock_scope", {1}), Outcome::success(std::int64_t{0}));
}

TEST(LockScope, CallerMustBeTrusted)
{
    World w = one_chain();
    EXPECT_EQ(entry(w, "lock_scope", {1, bytes("c/t1")}, at("c/mallory")).failure, Failure::NotTrusted);
    EXPECT_EQ(entry(w, "propose", {1}).failure, Failure::UnknownMethod);
    EXPECT_EQ(entry(w, "lock_scope", {bytes("x")}).failure, Failure::BadParams);
    EXPECT_FALSE(contract(w, "t1").locked);
}

TEST(RunAction, InsideLockedScope)
{
    World w = one_chain();
    ASSERT_TRUE(entry(w, "lock_scope", {1, bytes("c/t1")}).ok());
    EXPECT_TRUE(entry(w, "run_action", {1, 1, bytes("c/t1"), bytes("transfer"), bytes("alice"), bytes("bob"), 4}).ok());
    EXPECT_EQ(balance(w.chains.at(ChainId{"c"}), "t1", "bob"), 4);
    EXPECT_EQ(entry(w, "run_action", {1, 2, bytes("c/t1"), bytes("transfer"), bytes("alice"), bytes("bob"), 40})
                  .failure,
              Failure::InsufficientFunds);
}

TEST(RunAction, OutsideLockedScopeIsFatal)
{
    World w = one_chain();
    ASSERT_TRUE(entry(w, "lock_scope", {1, bytes("c/t1")}).ok());
    EXPECT_THROW(entry(w, "run_action", {1, 1, bytes("c/t2"), bytes("transfer"), bytes("alice"), bytes("bob"), 1}),
                 ScopeNotLocked);
    EXPECT_THROW(entry(w, "run_action", {2, 1, bytes("c/t1"), bytes("transfer"), bytes("alice"), bytes("bob"), 1}),
                 ScopeNotLocked);
}

TEST(UnlockScope, CommitAndAbortAndRepeat)
{
    World w = one_chain();
    const ContractState pre = contract(w, "t1").s;
    ASSERT_TRUE(entry(w, "lock_scope", {1, bytes("c/t1"), bytes("c/t2")}).ok());
    ASSERT_TRUE(entry(w, "run_action", {1, 1, bytes("c/t1"), bytes("transfer"), bytes("alice"), bytes("bob"), 4}).ok());
    EXPECT_EQ(entry(w, "unlock_scope", {1, true}), Outcome::success(std::int64_t{2}));
    EXPECT_EQ(contract(w, "t1").s, pre);
    EXPECT_FALSE(contract(w, "t1").locked);
    EXPECT_EQ(entry(w, "unlock_scope", {1, true}), Outcome::success(std::int64_t{0}));

    ASSERT_TRUE(entry(w, "lock_scope", {2, bytes("c/t1")}).ok());
    ASSERT_TRUE(entry(w, "run_action", {2, 1, bytes("c/t1"), bytes("transfer"), bytes("alice"), bytes("bob"), 4}).ok());
    EXPECT_TRUE(entry(w, "unlock_scope", {2, false}).ok());
    EXPECT_EQ(balance(w.chains.at(ChainId{"c"}), "t1", "bob"), 4);
    EXPECT_FALSE(contract(w, "t1").locked);
}

TEST(UnlockScope, LeavesOtherTransactionsLocksAlone)
{
    World w = one_chain();
    ASSERT_TRUE(entry(w, "lock_scope", {1, bytes("c/t1")}).ok());
    EXPECT_TRUE(entry(w, "unlock_scope", {2, true}).ok());
    EXPECT_TRUE(contract(w, "t1").locked);
}

TEST(Propose, LocksLocallyFirst)
{
    const auto res = run(bundled("swap"));
    const auto locks = events(res.trace, EventKind::Lock);
    ASSERT_EQ(locks.size(), 2u);
    EXPECT_EQ(locks[0]->chain->name, "fantom");
    EXPECT_EQ(locks[1]->chain->name, "mumbai");
    const auto sends = events(res.trace, EventKind::Send);
    ASSERT_FALSE(sends.empty());
    EXPECT_EQ(decode_payload(sends[0]->detail.at("payload")).index(), 1u);
    EXPECT_NE(sends[0]->detail.at("payload").find("|lock_scope|"), std::string::npos);
}

TEST(Propose, BusyExecutorRejects)
{
    Scenario sc = bundled("swap");
    World w = build_world(sc, 1);
    auto t2 = sc.txns[0];
    t2.txId = 2;
    EXPECT_TRUE(propose(w, sc.txns[0]).ok());
    EXPECT_EQ(propose(w, t2).failure, Failure::ExecutorBusy);
    const auto *o = outcome_of(w.trace, 2);
    ASSERT_NE(o, nullptr);
    EXPECT_EQ(o->detail.at("reason"), "ExecutorBusy");
}

TEST(Propose, CyclicOrderIsRejected)
{
    Scenario sc = bundled("swap");
    World w = build_world(sc, 1);
    auto t = sc.txns[0];
    t.prec = {{1, 2}, {2, 1}};
    EXPECT_THROW(propose(w, t), CyclicOrder);
}

TEST(Protocol, SuccessfulSwapIsSixMessages)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const auto res = run(bundled("swap"), RunOptions{seed, std::nullopt, false});
        const auto sends = events(res.trace, EventKind::Send);
        ASSERT_EQ(sends.size(), 6u);
        // Requests go out from the proposer, acknowledgements come back.
        const std::vector<std::string> expected{"lock_scope", "ack", "run_action", "ack", "unlock_scope", "ack"};
        for (std::size_t i = 0; i < 6; ++i)
            EXPECT_NE(sends[i]->detail.at("payload").find(expected[i]), std::string::npos) << i;
        EXPECT_EQ(outcome_of(res.trace, 1)->detail.at("outcome"), "Committed");
    }
}

TEST(Protocol, LockFailIsTwoAndTwo)
{
    const auto res = run(bundled("swap-lockfail"));
    const auto *o = outcome_of(res.trace, 1);
    EXPECT_EQ(o->detail.at("outcome"), "Aborted");
    EXPECT_EQ(o->detail.at("reason"), "LockConflict");
    EXPECT_EQ(sends_from(res.trace, "fantom"), 2u);
    EXPECT_EQ(sends_from(res.trace, "mumbai"), 2u);
    EXPECT_FALSE(res.world.chains.at(ChainId{"fantom"}).contracts.at(at("fantom/token")).locked);
}

TEST(Protocol, UpdateFailRevertsBothChains)
{
    const auto res = run(bundled("swap-updatefail"));
    const auto *o = outcome_of(res.trace, 1);
    EXPECT_EQ(o->detail.at("reason"), "OpFailed");
    EXPECT_EQ(sends_from(res.trace, "fantom"), 3u);
    EXPECT_EQ(sends_from(res.trace, "mumbai"), 3u);
    for (const auto &[id, c] : res.initial)
        for (const auto &[addr, k] : c.contracts)
            EXPECT_EQ(res.world.chains.at(id).contracts.at(addr).s, k.s) << addr;
}

TEST(Protocol, LayersRunAsSeparateRounds)
{
    Scenario sc = bundled("three-exchange");
    sc.txns[0].prec = {{1, 2}, {2, 3}};
    const auto res = run(sc);
    const auto *o = outcome_of(res.trace, 1);
    EXPECT_EQ(o->detail.at("outcome"), "Committed");
    EXPECT_EQ(o->detail.at("rounds"), "3");
    std::vector<std::uint64_t> actionOrder;
    for (const auto &e : res.trace.events())
        if (e.kind == EventKind::Invoke && e.detail.has("action") && e.detail.at("method") == "transfer")
            actionOrder.push_back(e.detail.u64("action"));
    EXPECT_EQ(actionOrder, (std::vector<std::uint64_t>{1, 2, 3}));
}

TEST(Protocol, NoExecutorLocksSurviveDone)
{
    for (const char *name : {"swap", "swap-lockfail", "swap-updatefail", "three-exchange", "symmetric-conflict"})
    {
        const auto res = run(bundled(name));
        for (const auto &[id, c] : res.world.chains)
            for (const auto &[addr, k] : c.contracts)
            {
                if (k.locked)
                {
                    EXPECT_FALSE(res.world.executors.contains(*k.lockedBy)) << name << " " << addr;
                }
            }
    }
}

TEST(Protocol, SymmetricConflictByLockOrder)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed)
    {
        const auto canon = run(bundled("symmetric-conflict"), RunOptions{seed, LockOrderMode::Canonical, false});
        int commits = 0;
        for (TxId tx : {1, 2})
            commits += outcome_of(canon.trace, tx)->detail.at("outcome") == "Committed" ? 1 : 0;
        EXPECT_EQ(commits, 1) << "seed " << seed;

        const auto decl = run(bundled("symmetric-conflict"), RunOptions{seed, LockOrderMode::Declared, false});
        EXPECT_TRUE(decl.quiesced);
        for (TxId tx : {1, 2})
        {
            const auto *o = outcome_of(decl.trace, tx);
            ASSERT_NE(o, nullptr);
            EXPECT_EQ(o->detail.at("outcome"), "Aborted");
            EXPECT_EQ(o->detail.at("reason"), "LockConflict");
        }
    }
}
