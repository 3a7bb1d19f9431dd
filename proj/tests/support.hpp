#pragma once

#include <xchain/xchain.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace xtest
{
    using namespace xchain;

    inline Address at(const std::string &text) { return parse_address(text); }

    inline Scenario bundled(const std::string &name)
    {
        return load_scenario(std::filesystem::path(XCHAIN_SCENARIO_DIR) / (name + ".yaml"));
    }

    /// Chain with one token contract `token` holding the given balances.
    inline Chain token_chain(const std::string &name, const std::map<std::string, std::int64_t> &balances)
    {
        Chain c;
        c.id = ChainId{name};
        c.executor = Address{c.id, "executor"};
        ContractConfig cfg;
        cfg.local = "token";
        cfg.type = "token";
        cfg.vars = token_balances(balances);
        Contract k = make_contract(c.id, c.executor, cfg);
        c.contracts.emplace(k.addr, std::move(k));
        return c;
    }

    inline void add_contract(Chain &c, ContractConfig cfg)
    {
        Contract k = make_contract(c.id, c.executor, cfg);
        c.contracts.emplace(k.addr, std::move(k));
    }

    inline std::int64_t balance(const Chain &c, const std::string &contract, const std::string &acct)
    {
        const Contract &k = c.contracts.at(Address{c.id, contract});
        return std::get<std::int64_t>(k.s.vars.at(builtin::account_key(acct)));
    }

    inline std::int64_t balance(const ChainMap &m, const std::string &chain, const std::string &acct)
    {
        return balance(m.at(ChainId{chain}), "token", acct);
    }

    inline std::size_t count(const Trace &t, EventKind kind)
    {
        std::size_t n = 0;
        for (const auto &e : t.events())
            n += e.kind == kind ? 1 : 0;
        return n;
    }

    inline const TraceEvent *outcome_of(const Trace &t, TxId tx)
    {
        for (const auto &e : t.events())
            if (e.kind == EventKind::Outcome && e.detail.u64("tx") == tx)
                return &e;
        return nullptr;
    }

    inline IndexedAction action(ActionId id, const std::string &target, const std::string &method, ValueList params)
    {
        const Address a = parse_address(target);
        return IndexedAction{id, a.chain, a, method, std::move(params)};
    }

    inline CrossChainTransaction swap_txn(std::int64_t leg1 = 10, std::int64_t leg2 = 5)
    {
        CrossChainTransaction t;
        t.txId = 1;
        t.proposer = ChainId{"fantom"};
        t.originator = at("fantom/alice");
        t.actions.push_back(action(1, "fantom/token", "transfer", {bytes("alice"), bytes("bob"), leg1}));
        t.actions.push_back(action(2, "mumbai/token", "transfer", {bytes("bob"), bytes("alice"), leg2}));
        return t;
    }
} // namespace xtest
